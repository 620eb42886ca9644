#pragma once

#include <cstdint>
#include <vector>

#include "fundus/imaging/raster.hpp"

namespace fundus::imaging {

/// 8-connected labelling. Labels are 1-based in raster scan order of each
/// component's first pixel; background is 0.
struct Components {
  int width = 0;
  int height = 0;
  int count = 0;
  std::vector<std::int32_t> labels;
  std::vector<std::size_t> sizes;  // sizes[k] is the pixel count of label k + 1

  std::int32_t at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
};

inline Components label_components(const Mask& mask) {
  Components out;
  out.width = mask.width();
  out.height = mask.height();
  out.labels.assign(static_cast<std::size_t>(out.width) * out.height, 0);
  std::vector<std::size_t> stack;
  const auto data = mask.data();
  for (std::size_t start = 0; start < data.size(); ++start) {
    if (!data[start] || out.labels[start]) continue;
    const std::int32_t label = ++out.count;
    std::size_t size = 0;
    out.labels[start] = label;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      ++size;
      const int px = static_cast<int>(p % out.width), py = static_cast<int>(p / out.width);
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = px + dx, ny = py + dy;
          if (nx < 0 || ny < 0 || nx >= out.width || ny >= out.height) continue;
          const std::size_t q = static_cast<std::size_t>(ny) * out.width + nx;
          if (data[q] && !out.labels[q]) {
            out.labels[q] = label;
            stack.push_back(q);
          }
        }
    }
    out.sizes.push_back(size);
  }
  return out;
}

/// Drops 8-connected components with fewer than `min_size` pixels.
inline Mask remove_small_components(const Mask& mask, std::size_t min_size) {
  const Components cc = label_components(mask);
  Mask out(mask.width(), mask.height());
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const auto l = cc.labels[i];
    dst[i] = (l > 0 && cc.sizes[l - 1] >= min_size) ? 1 : 0;
  }
  return out;
}

}  // namespace fundus::imaging
