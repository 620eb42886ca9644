#pragma once

#include <cmath>

#include "fundus/imaging/color.hpp"
#include "fundus/imaging/resize.hpp"

namespace fundus::vasculature {

using imaging::Point;
using imaging::Raster;
using imaging::Rect;

struct MaculaAssessment {
  Point fovea;
  Rect window;  // clipped to the image
  double template_error = 0.0;
  bool suspicious = false;
};

inline constexpr double kMaculaWindowInDiameters = 1.5;
/// Threshold separating the bundled synthetic healthy and lesioned maculae.
inline constexpr double kDefaultMaculaThreshold = 2.0;

/// Healthy-macula stand-in: a smooth radial darkening towards the centre.
inline Raster synthetic_macula_template(int size = 128) {
  Raster t(size, size, 1);
  const double c = size / 2.0, sigma = size / 3.5;
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      const double r2 = (x + 0.5 - c) * (x + 0.5 - c) + (y + 0.5 - c) * (y + 0.5 - c);
      t.at(x, y) = 0.6 - 0.25 * std::exp(-r2 / (2.0 * sigma * sigma));
    }
  return t;
}

namespace detail {

inline void standardize(Raster& r) {
  auto v = r.plane(0);
  double mean = 0.0;
  for (double s : v) mean += s;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double s : v) var += (s - mean) * (s - mean);
  const double sd = std::sqrt(var / static_cast<double>(v.size()));
  for (double& s : v) s = sd > 0.0 ? (s - mean) / sd : 0.0;
}

}  // namespace detail

/// Compares the 1.5D × 1.5D window centred on the fovea with a healthy
/// template after standardising both (zero mean, unit variance). The error
/// is the mean squared difference over the part of the window inside the
/// image.
inline MaculaAssessment assess_macula(const Raster& image, Point fovea, double od_diameter, const Raster& templ,
                                      double threshold = kDefaultMaculaThreshold) {
  if (templ.empty()) throw invalid_input("assess_macula: empty template");
  if (!(od_diameter > 0.0)) throw invalid_input("assess_macula: disc diameter must be positive");
  const int side = std::max(2, static_cast<int>(std::lround(kMaculaWindowInDiameters * od_diameter)));
  const Rect full{static_cast<int>(std::lround(fovea.x - side / 2.0)), static_cast<int>(std::lround(fovea.y - side / 2.0)),
                  side, side};
  const Rect win = imaging::intersect(full, image.bounds());
  if (win.empty()) throw Error(ErrorCode::Degenerate, "assess_macula: window lies outside the image");

  Raster patch = imaging::crop(image, win);
  if (patch.channels() == 3) patch = imaging::to_grayscale(patch);
  Raster t = templ.channels() == 3 ? imaging::to_grayscale(templ) : templ;
  t = imaging::resize_bilinear(t, side, side);
  t = imaging::crop(t, {win.x - full.x, win.y - full.y, win.width, win.height});
  detail::standardize(patch);
  detail::standardize(t);

  double err = 0.0;
  const auto a = patch.plane(0), b = t.plane(0);
  for (std::size_t i = 0; i < a.size(); ++i) err += (a[i] - b[i]) * (a[i] - b[i]);
  err /= static_cast<double>(a.size());
  return {fovea, win, err, err > threshold};
}

}  // namespace fundus::vasculature
