#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "fundus/imaging/components.hpp"
#include "fundus/imaging/raster.hpp"

namespace fundus::vasculature {

using imaging::Mask;
using imaging::Raster;

enum class VesselSource { ExternalFile, BaselineSegmenter };

struct VesselMap {
  Mask binary;
  VesselSource source = VesselSource::BaselineSegmenter;
};

struct SegmenterParams {
  int orientations = 12;
  int line_length = 15;
  double percentile = 0.92;
  std::size_t min_component = 50;
};

namespace detail {

/// Pixel offsets of a centred digital line segment at angle `theta`.
inline std::vector<std::pair<int, int>> line_offsets(double theta, int length) {
  std::vector<std::pair<int, int>> out;
  const double half = (length - 1) / 2.0;
  for (int i = 0; i < length; ++i) {
    const double t = i - half;
    std::pair<int, int> o{static_cast<int>(std::lround(t * std::cos(theta))),
                          static_cast<int>(std::lround(t * std::sin(theta)))};
    if (std::find(out.begin(), out.end(), o) == out.end()) out.push_back(o);
  }
  return out;
}

/// Flat grayscale erosion (take_min) or dilation with a symmetric line;
/// samples outside the image are ignored.
inline Raster line_filter(const Raster& img, const std::vector<std::pair<int, int>>& offsets, bool take_min) {
  const int w = img.width(), h = img.height();
  Raster out(w, h, 1);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double v = take_min ? 1e300 : -1e300;
      for (const auto& [dx, dy] : offsets) {
        const int nx = x + dx, ny = y + dy;
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const double s = img.at(nx, ny);
        v = take_min ? std::min(v, s) : std::max(v, s);
      }
      out.at(x, y) = v;
    }
  return out;
}

}  // namespace detail

/// Line-detector response: the largest top-hat over line openings at evenly
/// spaced orientations, applied to the inverted green channel so that dark
/// vessels narrower than the line become bright ridges.
inline Raster vessel_response(const Raster& img, const SegmenterParams& p = {}) {
  if (img.channels() != 1 && img.channels() != 3) throw invalid_input("vessel_response: bad channel count");
  const int green = img.channels() == 3 ? 1 : 0;
  Raster inv(img.width(), img.height(), 1);
  const auto src = img.plane(green);
  auto dst = inv.plane(0);
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = 1.0 - src[i];

  Raster response(img.width(), img.height(), 1, 0.0);
  for (int k = 0; k < p.orientations; ++k) {
    const auto line = detail::line_offsets(std::numbers::pi * k / p.orientations, p.line_length);
    const Raster opened = detail::line_filter(detail::line_filter(inv, line, true), line, false);
    auto r = response.plane(0);
    const std::span<const double> a = inv.plane(0), o = opened.plane(0);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = std::max(r[i], a[i] - o[i]);
  }
  return response;
}

/// Baseline stand-in for a dedicated vessel segmenter: thresholds the line
/// response above its `percentile` quantile and removes small components.
inline VesselMap baseline_segment_vessels(const Raster& img, const SegmenterParams& p = {}) {
  const Raster response = vessel_response(img, p);
  std::vector<double> sorted(response.data().begin(), response.data().end());
  const auto rank = static_cast<std::size_t>(std::clamp(p.percentile, 0.0, 1.0) * (sorted.size() - 1));
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(rank), sorted.end());
  const double threshold = sorted[rank];

  Mask raw(img.width(), img.height());
  auto m = raw.data();
  const auto r = response.data();
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = r[i] > threshold ? 1 : 0;
  return {imaging::remove_small_components(raw, p.min_component), VesselSource::BaselineSegmenter};
}

/// Interprets any nonzero sample as vessel.
inline VesselMap vessel_map_from_raster(const Raster& binary) {
  Mask m(binary.width(), binary.height());
  const auto src = binary.plane(0);
  auto dst = m.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = src[i] != 0.0 ? 1 : 0;
  return {std::move(m), VesselSource::ExternalFile};
}

}  // namespace fundus::vasculature
