#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "fundus/encoding/codebook.hpp"

namespace fundus::encoding {

struct KMeansOptions {
  int max_iterations = 100;
  double shift_tolerance = 1e-6;
  double sigma = 1.0;
  double lambda = 1e-4;
};

namespace detail {

inline std::size_t count_distinct_columns(const Eigen::MatrixXd& x) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index i = 0; i < x.cols(); ++i) order[i] = i;
  auto less = [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index d = 0; d < x.rows(); ++d)
      if (x(d, a) != x(d, b)) return x(d, a) < x(d, b);
    return false;
  };
  std::sort(order.begin(), order.end(), less);
  std::size_t distinct = order.empty() ? 0 : 1;
  for (std::size_t i = 1; i < order.size(); ++i)
    if (less(order[i - 1], order[i])) ++distinct;
  return distinct;
}

/// Squared distances, points × centres, via the Gram expansion.
inline Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& x, const Eigen::MatrixXd& c) {
  Eigen::MatrixXd d = -2.0 * (x.transpose() * c);
  d.colwise() += x.colwise().squaredNorm().transpose();
  d.rowwise() += c.colwise().squaredNorm();
  return d.cwiseMax(0.0);
}

}  // namespace detail

/// k-means with k-means++ seeding. `points` holds one sample per column.
/// Deterministic for a fixed seed; empty clusters are re-seeded with the
/// point farthest from its current centre.
inline Codebook learn_codebook(const Eigen::MatrixXd& points, int m, std::uint64_t seed,
                               const KMeansOptions& opt = {}) {
  if (m < 2) throw invalid_input("learn_codebook: vocabulary size must be at least 2");
  const std::size_t distinct = detail::count_distinct_columns(points);
  if (distinct < static_cast<std::size_t>(m))
    throw invalid_input("learn_codebook: " + std::to_string(distinct) + " distinct samples for " +
                        std::to_string(m) + " words");

  const Eigen::Index n = points.cols();
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd centres(points.rows(), m);
  std::vector<double> nearest(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());

  Eigen::Index pick = std::uniform_int_distribution<Eigen::Index>(0, n - 1)(rng);
  for (int k = 0; k < m; ++k) {
    centres.col(k) = points.col(pick);
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], (points.col(i) - centres.col(k)).squaredNorm());
      total += nearest[i];
    }
    if (k + 1 == m) break;
    double r = std::uniform_real_distribution<double>(0.0, total)(rng);
    pick = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (nearest[i] <= 0.0) continue;
      pick = i;
      r -= nearest[i];
      if (r < 0.0) break;
    }
  }

  std::vector<int> assign(static_cast<std::size_t>(n), -1);
  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    const Eigen::MatrixXd d2 = detail::squared_distances(points, centres);
    std::vector<double> own(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index best;
      own[i] = d2.row(i).minCoeff(&best);
      assign[i] = static_cast<int>(best);
    }

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(points.rows(), m);
    std::vector<std::size_t> counts(static_cast<std::size_t>(m), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.col(assign[i]) += points.col(i);
      ++counts[assign[i]];
    }
    for (int k = 0; k < m; ++k) {
      if (counts[k] > 0) continue;
      const auto far = static_cast<Eigen::Index>(std::max_element(own.begin(), own.end()) - own.begin());
      --counts[assign[far]];
      sums.col(assign[far]) -= points.col(far);
      assign[far] = k;
      own[far] = 0.0;
      sums.col(k) = points.col(far);
      counts[k] = 1;
    }

    double shift = 0.0;
    for (int k = 0; k < m; ++k) {
      const Eigen::VectorXd next = sums.col(k) / static_cast<double>(counts[k]);
      shift = std::max(shift, (next - centres.col(k)).norm());
      centres.col(k) = next;
    }
    if (shift < opt.shift_tolerance) break;
  }
  return Codebook(std::move(centres), opt.sigma, opt.lambda);
}

inline Eigen::MatrixXd to_matrix(std::span<const std::vector<double>> samples) {
  if (samples.empty()) return {};
  Eigen::MatrixXd x(static_cast<Eigen::Index>(samples.front().size()), static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].size() != samples.front().size()) throw invalid_input("samples differ in dimension");
    for (std::size_t d = 0; d < samples[i].size(); ++d) x(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(i)) = samples[i][d];
  }
  return x;
}

}  // namespace fundus::encoding
