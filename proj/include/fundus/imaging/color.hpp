#pragma once

#include <array>
#include <cmath>

#include "fundus/imaging/raster.hpp"

namespace fundus::imaging {

/// RGB → XYZ matrix and the white point it implies. Each matrix row sums to
/// one, so (1, 1, 1) is its own white point and no illuminant table is needed.
struct XyzConstants {
  static constexpr std::array<std::array<double, 3>, 3> rgb_to_xyz{{
      {0.4887180, 0.3106803, 0.2006017},
      {0.1762044, 0.8129847, 0.0108109},
      {0.0000000, 0.0102048, 0.9897952},
  }};

  static constexpr std::array<double, 3> white_point() {
    std::array<double, 3> w{};
    for (int r = 0; r < 3; ++r) w[r] = rgb_to_xyz[r][0] + rgb_to_xyz[r][1] + rgb_to_xyz[r][2];
    return w;
  }
};

/// CIE Lab companding function. The linear branch meets the cube root at
/// q = 0.008856 to about 1e-7.
inline double lab_companding(double q) {
  constexpr double threshold = 0.008856;
  return q > threshold ? std::cbrt(q) : 7.787 * q + 16.0 / 116.0;
}

struct Lab {
  double L = 0.0;
  double a = 0.0;
  double b = 0.0;
};

/// Camera RGB in [0, 1] goes straight through the matrix; no gamma
/// linearization is applied.
inline Lab rgb_to_lab(double r, double g, double b) {
  const auto& m = XyzConstants::rgb_to_xyz;
  static constexpr auto white = XyzConstants::white_point();
  const double X = m[0][0] * r + m[0][1] * g + m[0][2] * b;
  const double Y = m[1][0] * r + m[1][1] * g + m[1][2] * b;
  const double Z = m[2][0] * r + m[2][1] * g + m[2][2] * b;
  const double hx = lab_companding(X / white[0]);
  const double hy = lab_companding(Y / white[1]);
  const double hz = lab_companding(Z / white[2]);
  return {116.0 * hy - 16.0, 500.0 * (hx - hy), 200.0 * (hy - hz)};
}

/// Three co-registered planes: L (0-100 for in-gamut input), a, b.
class LabRaster {
public:
  LabRaster() = default;
  LabRaster(int width, int height) : planes_(width, height, 3) {}

  int width() const { return planes_.width(); }
  int height() const { return planes_.height(); }

  std::span<double> L() { return planes_.plane(0); }
  std::span<double> a() { return planes_.plane(1); }
  std::span<double> b() { return planes_.plane(2); }
  std::span<const double> L() const { return planes_.plane(0); }
  std::span<const double> a() const { return planes_.plane(1); }
  std::span<const double> b() const { return planes_.plane(2); }

  std::span<const double> plane(int c) const { return planes_.plane(c); }
  std::span<double> plane(int c) { return planes_.plane(c); }

  /// The three planes as one 3-channel raster (channel order L, a, b).
  const Raster& planes() const { return planes_; }

private:
  Raster planes_;
};

inline LabRaster rgb_to_lab(const Raster& img) {
  require_channels(img, 3, "rgb_to_lab");
  LabRaster out(img.width(), img.height());
  const auto r = img.plane(0), g = img.plane(1), b = img.plane(2);
  auto L = out.L(), A = out.a(), B = out.b();
  for (std::size_t i = 0; i < r.size(); ++i) {
    const Lab lab = rgb_to_lab(r[i], g[i], b[i]);
    L[i] = lab.L;
    A[i] = lab.a;
    B[i] = lab.b;
  }
  return out;
}

inline constexpr std::array<double, 3> kGrayWeights{0.299, 0.587, 0.114};

inline Raster to_grayscale(const Raster& img) {
  require_channels(img, 3, "to_grayscale");
  Raster out(img.width(), img.height(), 1);
  const auto r = img.plane(0), g = img.plane(1), b = img.plane(2);
  auto dst = out.plane(0);
  for (std::size_t i = 0; i < dst.size(); ++i)
    dst[i] = kGrayWeights[0] * r[i] + kGrayWeights[1] * g[i] + kGrayWeights[2] * b[i];
  return out;
}

}  // namespace fundus::imaging
