#pragma once

#include <span>
#include <vector>

#include "fundus/imaging/raster.hpp"

namespace fundus::imaging {

/// Summed-area table with a zero guard row/column, so that any box sum costs
/// four lookups regardless of box size.
class IntegralImage {
public:
  IntegralImage(std::span<const double> plane, int width, int height)
      : width_(width), height_(height),
        sums_(static_cast<std::size_t>(width + 1) * (height + 1), 0.0) {
    for (int y = 0; y < height; ++y) {
      double row = 0.0;
      for (int x = 0; x < width; ++x) {
        row += plane[static_cast<std::size_t>(y) * width + x];
        sums_[idx(x + 1, y + 1)] = sums_[idx(x + 1, y)] + row;
      }
    }
  }

  /// Sum over the half-open box [x0, x1) × [y0, y1); callers clip to bounds.
  double box_sum(int x0, int y0, int x1, int y1) const {
    return sums_[idx(x1, y1)] - sums_[idx(x0, y1)] - sums_[idx(x1, y0)] + sums_[idx(x0, y0)];
  }

  int width() const { return width_; }
  int height() const { return height_; }

private:
  std::size_t idx(int x, int y) const { return static_cast<std::size_t>(y) * (width_ + 1) + x; }

  int width_;
  int height_;
  std::vector<double> sums_;
};

}  // namespace fundus::imaging
