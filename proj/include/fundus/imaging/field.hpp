#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

#include "fundus/imaging/components.hpp"
#include "fundus/imaging/raster.hpp"

namespace fundus::imaging {

/// Otsu threshold of samples in [0, 1] over 256 bins; returns the upper edge
/// of the last background bin.
inline double otsu_threshold(std::span<const double> samples) {
  constexpr int kBins = 256;
  std::array<double, kBins> hist{};
  for (double v : samples) hist[static_cast<std::size_t>(std::clamp(v, 0.0, 1.0) * (kBins - 1) + 0.5)] += 1.0;
  const double total = static_cast<double>(samples.size());
  double sum_all = 0.0;
  for (int i = 0; i < kBins; ++i) sum_all += i * hist[i];
  double w0 = 0.0, sum0 = 0.0, best = -1.0;
  int split = 0;
  for (int t = 0; t < kBins - 1; ++t) {
    w0 += hist[t];
    sum0 += t * hist[t];
    const double w1 = total - w0;
    if (w0 == 0.0 || w1 == 0.0) continue;
    const double m0 = sum0 / w0, m1 = (sum_all - sum0) / w1;
    const double between = w0 * w1 * (m0 - m1) * (m0 - m1);
    if (between > best) {
      best = between;
      split = t;
    }
  }
  return (split + 0.5) / (kBins - 1);
}

/// Camera field of view: the largest 8-connected component of pixels whose
/// grayscale value exceeds the Otsu threshold. An image without two
/// intensity classes is all field.
inline Mask field_of_view(const Raster& gray) {
  require_channels(gray, 1, "field_of_view");
  const auto v = gray.plane(0);
  const double t = otsu_threshold(v);
  Mask raw(gray.width(), gray.height());
  auto m = raw.data();
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = v[i] > t ? 1 : 0;
  const Components cc = label_components(raw);
  if (cc.count == 0) return Mask(gray.width(), gray.height(), true);
  const auto largest = static_cast<std::int32_t>(std::max_element(cc.sizes.begin(), cc.sizes.end()) - cc.sizes.begin()) + 1;
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = cc.labels[i] == largest ? 1 : 0;
  return raw;
}

}  // namespace fundus::imaging
