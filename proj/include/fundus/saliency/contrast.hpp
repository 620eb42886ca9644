#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "fundus/imaging/color.hpp"
#include "fundus/imaging/integral.hpp"

namespace fundus::saliency {

using imaging::LabRaster;
using imaging::Raster;

inline constexpr int kInnerPatch = 9;

/// Square box of side `size` anchored so that it spans
/// [x - size/2, x - size/2 + size) on each axis, clipped to the image.
struct Box {
  int x0, y0, x1, y1;
};

inline Box centered_box(int x, int y, int size, int width, int height) {
  const int x0 = x - size / 2;
  const int y0 = y - size / 2;
  return {std::max(x0, 0), std::max(y0, 0), std::min(x0 + size, width), std::min(y0 + size, height)};
}

/// Admissible outer-patch side lengths for an image with `columns` columns:
/// [ceil(c/8), floor(c/2)], floored at one pixel so tiny images stay valid.
inline std::array<int, 2> outer_size_bounds(int columns) {
  const int lo = std::max(1, (columns + 7) / 8);
  const int hi = std::max(lo, columns / 2);
  return {lo, hi};
}

inline void check_outer_size(int outer_size, int columns) {
  const auto [lo, hi] = outer_size_bounds(columns);
  if (outer_size < lo || outer_size > hi)
    throw invalid_input("outer patch size " + std::to_string(outer_size) + " outside [" +
                        std::to_string(lo) + ", " + std::to_string(hi) + "] for " +
                        std::to_string(columns) + " columns");
}

namespace detail {

struct LabIntegrals {
  explicit LabIntegrals(const LabRaster& lab)
      : planes{imaging::IntegralImage(lab.L(), lab.width(), lab.height()),
               imaging::IntegralImage(lab.a(), lab.width(), lab.height()),
               imaging::IntegralImage(lab.b(), lab.width(), lab.height())} {}

  std::array<double, 3> mean(const Box& b) const {
    const double n = static_cast<double>(b.x1 - b.x0) * (b.y1 - b.y0);
    return {planes[0].box_sum(b.x0, b.y0, b.x1, b.y1) / n,
            planes[1].box_sum(b.x0, b.y0, b.x1, b.y1) / n,
            planes[2].box_sum(b.x0, b.y0, b.x1, b.y1) / n};
  }

  std::array<imaging::IntegralImage, 3> planes;
};

inline Raster inner_means(const LabIntegrals& sat, int width, int height) {
  Raster out(width, height, 3);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const auto m = sat.mean(centered_box(x, y, kInnerPatch, width, height));
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = m[c];
    }
  return out;
}

inline Raster contrast_map(const LabIntegrals& sat, const Raster& inner, int outer_size) {
  const int w = inner.width(), h = inner.height();
  Raster out(w, h, 1);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const auto m = sat.mean(centered_box(x, y, outer_size, w, h));
      const double dl = inner.at(x, y, 0) - m[0];
      const double da = inner.at(x, y, 1) - m[1];
      const double db = inner.at(x, y, 2) - m[2];
      out.at(x, y) = std::sqrt(dl * dl + da * da + db * db);
    }
  return out;
}

}  // namespace detail

/// Per-pixel Euclidean distance between the mean Lab vector of the 9×9 patch
/// and that of the outer_size × outer_size neighbourhood around it.
inline Raster contrast_saliency_at_scale(const LabRaster& lab, int outer_size) {
  check_outer_size(outer_size, lab.width());
  const detail::LabIntegrals sat(lab);
  return detail::contrast_map(sat, detail::inner_means(sat, lab.width(), lab.height()), outer_size);
}

struct SaliencyMap {
  Raster values;
  std::vector<int> scales_used;   // ascending
  std::vector<Raster> per_scale;  // parallel to scales_used
};

inline constexpr int kMinSaliencyWidth = 64;

/// Outer sizes {ceil(c/8), c/4, c/2}, ascending.
inline std::vector<int> default_scales(int columns) {
  const auto [lo, hi] = outer_size_bounds(columns);
  return {lo, columns / 4, hi};
}

/// Sum of the contrast maps over `scales` (ascending summation order, so the
/// result does not depend on how per-scale maps were produced).
inline SaliencyMap multiscale_saliency(const LabRaster& lab, std::vector<int> scales = {}) {
  if (lab.width() < kMinSaliencyWidth)
    throw invalid_input("multiscale_saliency: image must be at least " +
                        std::to_string(kMinSaliencyWidth) + " px wide");
  if (scales.empty()) scales = default_scales(lab.width());
  std::sort(scales.begin(), scales.end());
  for (int s : scales) check_outer_size(s, lab.width());

  const detail::LabIntegrals sat(lab);
  const Raster inner = detail::inner_means(sat, lab.width(), lab.height());

  SaliencyMap out{Raster(lab.width(), lab.height(), 1), scales, {}};
  for (int s : scales) {
    Raster m = detail::contrast_map(sat, inner, s);
    auto dst = out.values.data();
    const auto src = m.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    out.per_scale.push_back(std::move(m));
  }
  return out;
}

}  // namespace fundus::saliency
