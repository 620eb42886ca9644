#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fundus/io/binary.hpp"

namespace fundus::encoding {

/// Visual vocabulary: one basis vector per column. `sigma` and `lambda` only
/// matter to the exact (penalised) LLC solver.
class Codebook {
public:
  static constexpr double kMinSeparation = 1e-9;

  Codebook() = default;
  explicit Codebook(Eigen::MatrixXd bases, double sigma = 1.0, double lambda = 1e-4)
      : bases_(std::move(bases)), sigma_(sigma), lambda_(lambda) {
    if (bases_.cols() < 2) throw invalid_input("codebook needs at least two bases");
    if (bases_.rows() < 1) throw invalid_input("codebook bases must have positive dimension");
    if (!bases_.allFinite()) throw invalid_input("codebook bases must be finite");
    if (!(sigma_ > 0.0) || !(lambda_ >= 0.0)) throw invalid_input("codebook sigma must be > 0 and lambda >= 0");
    for (Eigen::Index i = 0; i < bases_.cols(); ++i)
      for (Eigen::Index j = i + 1; j < bases_.cols(); ++j)
        if ((bases_.col(i) - bases_.col(j)).norm() <= kMinSeparation)
          throw invalid_input("codebook bases " + std::to_string(i) + " and " + std::to_string(j) +
                              " coincide");
  }

  int size() const { return static_cast<int>(bases_.cols()); }
  int dim() const { return static_cast<int>(bases_.rows()); }
  const Eigen::MatrixXd& bases() const { return bases_; }
  double sigma() const { return sigma_; }
  double lambda() const { return lambda_; }

  friend bool operator==(const Codebook& a, const Codebook& b) {
    return a.bases_.rows() == b.bases_.rows() && a.bases_.cols() == b.bases_.cols() &&
           a.bases_ == b.bases_ && a.sigma_ == b.sigma_ && a.lambda_ == b.lambda_;
  }

private:
  Eigen::MatrixXd bases_;
  double sigma_ = 1.0;
  double lambda_ = 1e-4;
};

inline constexpr char kCodebookMagic[] = "FLCB";
inline constexpr std::uint32_t kCodebookVersion = 1;

/// "FLCB", u32 version, u32 M, u32 dim, M×dim f64 (basis-major), f64 sigma,
/// f64 lambda; all little-endian.
inline void write_codebook(std::ostream& os, const Codebook& cb) {
  io::BinaryWriter w(os);
  w.magic(kCodebookMagic);
  w.u32(kCodebookVersion);
  w.u32(static_cast<std::uint32_t>(cb.size()));
  w.u32(static_cast<std::uint32_t>(cb.dim()));
  for (int j = 0; j < cb.size(); ++j)
    for (int d = 0; d < cb.dim(); ++d) w.f64(cb.bases()(d, j));
  w.f64(cb.sigma());
  w.f64(cb.lambda());
}

inline Codebook read_codebook(std::istream& is, const std::string& source = "codebook") {
  io::BinaryReader r(is, source);
  r.expect_magic(kCodebookMagic);
  const auto version = r.u32();
  if (version != kCodebookVersion)
    throw format_error(source + ": unsupported codebook version " + std::to_string(version));
  const auto m = r.bounded_u32("M", 1u << 16);
  const auto dim = r.bounded_u32("dim", 1u << 16);
  Eigen::MatrixXd bases(dim, m);
  for (std::uint32_t j = 0; j < m; ++j)
    for (std::uint32_t d = 0; d < dim; ++d) bases(d, j) = r.f64();
  const double sigma = r.f64();
  const double lambda = r.f64();
  try {
    return Codebook(std::move(bases), sigma, lambda);
  } catch (const Error& e) {
    throw format_error(source + ": " + e.what());
  }
}

inline void save_codebook(const std::string& path, const Codebook& cb) {
  auto os = io::open_for_write(path);
  write_codebook(os, cb);
  if (!os) throw io_error("failed writing " + path);
}

inline Codebook load_codebook(const std::string& path) {
  auto is = io::open_for_read(path);
  return read_codebook(is, path);
}

}  // namespace fundus::encoding
