#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "fundus/descriptors/hog.hpp"
#include "fundus/encoding/codebook.hpp"

namespace fundus::encoding {

inline constexpr double kLlcRidge = 1e-9;
inline constexpr int kDefaultLlcNeighbours = 5;

/// Affine code over the codebook: coefficients sum to one.
struct LlcCode {
  std::vector<double> coefficients;
};

struct BowHistogram {
  std::vector<double> counts;
  double total = 0.0;
};

namespace detail {

/// Minimises ||x - Z c||^2 subject to 1ᵀc = 1 given the shifted local bases
/// Z = B_local - x 1ᵀ and an optional diagonal penalty.
inline Eigen::VectorXd constrained_weights(const Eigen::MatrixXd& shifted, const Eigen::VectorXd* penalty) {
  Eigen::MatrixXd cov = shifted.transpose() * shifted;
  if (penalty) cov.diagonal() += *penalty;
  cov.diagonal().array() += kLlcRidge;
  Eigen::VectorXd w = cov.ldlt().solve(Eigen::VectorXd::Ones(cov.rows()));
  return w / w.sum();
}

}  // namespace detail

/// Approximated LLC: the k nearest bases (ties by index) reconstruct x under
/// the sum-to-one constraint, solved analytically.
inline LlcCode llc_encode(std::span<const double> x, const Codebook& cb, int k = kDefaultLlcNeighbours) {
  if (static_cast<int>(x.size()) != cb.dim()) throw invalid_input("llc_encode: descriptor dimension mismatch");
  if (k < 1 || k > cb.size()) throw invalid_input("llc_encode: k must lie in [1, M]");
  const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  const Eigen::VectorXd d2 = (cb.bases().colwise() - xv).colwise().squaredNorm().transpose();

  std::vector<int> order(static_cast<std::size_t>(cb.size()));
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](int a, int b) {
    return d2[a] < d2[b] || (d2[a] == d2[b] && a < b);
  });

  LlcCode code{std::vector<double>(static_cast<std::size_t>(cb.size()), 0.0)};
  // x on a basis: the ridge would leave a residue of order eps on the others
  if (d2[order[0]] == 0.0) {
    code.coefficients[order[0]] = 1.0;
    return code;
  }

  Eigen::MatrixXd shifted(cb.dim(), k);
  for (int i = 0; i < k; ++i) shifted.col(i) = cb.bases().col(order[i]) - xv;
  const Eigen::VectorXd w = detail::constrained_weights(shifted, nullptr);

  for (int i = 0; i < k; ++i) code.coefficients[order[i]] = w[i];
  return code;
}

/// Full penalised LLC over all M bases with locality adaptor
/// exp(||x - b_j|| / sigma) weighted by lambda.
inline LlcCode llc_encode_exact(std::span<const double> x, const Codebook& cb) {
  if (static_cast<int>(x.size()) != cb.dim()) throw invalid_input("llc_encode_exact: descriptor dimension mismatch");
  const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  const Eigen::MatrixXd shifted = cb.bases().colwise() - xv;
  const Eigen::VectorXd dist = shifted.colwise().norm().transpose();
  const Eigen::VectorXd adaptor = (dist.array() / cb.sigma()).exp();
  const Eigen::VectorXd penalty = cb.lambda() * adaptor.array().square();
  const Eigen::VectorXd w = detail::constrained_weights(shifted, &penalty);
  return {std::vector<double>(w.data(), w.data() + w.size())};
}

inline double reconstruction_error(std::span<const double> x, const Codebook& cb, std::span<const double> coefficients) {
  const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  const Eigen::Map<const Eigen::VectorXd> c(coefficients.data(), static_cast<Eigen::Index>(coefficients.size()));
  return (xv - cb.bases() * c).squaredNorm();
}

/// Sum-pools the per-block codes of one descriptor; negative coefficients are
/// clipped so the histogram has count semantics.
inline BowHistogram encode_window(const descriptors::HogDescriptor& desc, const Codebook& cb,
                                  int k = kDefaultLlcNeighbours) {
  if (desc.values.empty()) throw invalid_input("encode_window: empty descriptor");
  BowHistogram h{std::vector<double>(static_cast<std::size_t>(cb.size()), 0.0), 0.0};
  for (std::size_t b = 0; b < desc.block_count(); ++b) {
    const LlcCode code = llc_encode(desc.block(b), cb, k);
    for (std::size_t j = 0; j < code.coefficients.size(); ++j) h.counts[j] += std::max(code.coefficients[j], 0.0);
  }
  h.total = std::accumulate(h.counts.begin(), h.counts.end(), 0.0);
  return h;
}

}  // namespace fundus::encoding
