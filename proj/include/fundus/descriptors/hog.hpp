#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "fundus/imaging/raster.hpp"

namespace fundus::descriptors {

using imaging::Raster;

inline constexpr int kWindowCols = 112;
inline constexpr int kWindowRows = 122;
inline constexpr int kCellSize = 8;
inline constexpr int kBlockCells = 2;
inline constexpr int kBins = 9;
inline constexpr int kBlockDim = kBlockCells * kBlockCells * kBins;  // 36
inline constexpr double kNormEpsilon = 1e-12;

struct HogDescriptor {
  std::vector<double> values;
  int blocks_x = 0;
  int blocks_y = 0;

  std::size_t block_count() const { return static_cast<std::size_t>(blocks_x) * blocks_y; }
  std::span<const double> block(std::size_t i) const {
    return std::span<const double>(values).subspan(i * kBlockDim, kBlockDim);
  }
};

/// Dalal-Triggs style HOG over a grayscale window of exactly
/// kWindowCols × kWindowRows pixels.
///
/// Gradients use centred [-1, 0, 1] differences with replicated borders.
/// Orientation is unsigned (0-180°) and votes by magnitude into the two
/// nearest of 9 bins centred at 0°, 20°, ..., 160°. Blocks of 2×2 cells of
/// 8×8 pixels step by one cell and are L2-normalised, giving 13 × 14 blocks
/// of 36 values (6552 in total).
inline HogDescriptor hog(const Raster& window) {
  imaging::require_channels(window, 1, "hog");
  if (window.width() != kWindowCols || window.height() != kWindowRows)
    throw invalid_input("hog: window must be " + std::to_string(kWindowCols) + "x" +
                        std::to_string(kWindowRows) + ", got " + std::to_string(window.width()) + "x" +
                        std::to_string(window.height()));

  constexpr int cells_x = kWindowCols / kCellSize;
  constexpr int cells_y = kWindowRows / kCellSize;
  constexpr double bin_width = 180.0 / kBins;
  std::vector<std::array<double, kBins>> cells(static_cast<std::size_t>(cells_x) * cells_y);
  for (auto& c : cells) c.fill(0.0);

  const int w = window.width(), h = window.height();
  for (int y = 0; y < cells_y * kCellSize; ++y) {
    for (int x = 0; x < cells_x * kCellSize; ++x) {
      const double gx = window.at(std::min(x + 1, w - 1), y) - window.at(std::max(x - 1, 0), y);
      const double gy = window.at(x, std::min(y + 1, h - 1)) - window.at(x, std::max(y - 1, 0));
      const double mag = std::hypot(gx, gy);
      if (mag == 0.0) continue;
      double angle = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
      if (angle < 0.0) angle += 180.0;
      if (angle >= 180.0) angle -= 180.0;
      const double pos = angle / bin_width;
      const int b0 = static_cast<int>(std::floor(pos)) % kBins;
      const int b1 = (b0 + 1) % kBins;
      const double t = pos - std::floor(pos);
      auto& hist = cells[static_cast<std::size_t>(y / kCellSize) * cells_x + x / kCellSize];
      hist[b0] += mag * (1.0 - t);
      hist[b1] += mag * t;
    }
  }

  HogDescriptor out;
  out.blocks_x = (kWindowCols - kBlockCells * kCellSize) / kCellSize + 1;
  out.blocks_y = (kWindowRows - kBlockCells * kCellSize) / kCellSize + 1;
  out.values.reserve(out.block_count() * kBlockDim);
  for (int by = 0; by < out.blocks_y; ++by) {
    for (int bx = 0; bx < out.blocks_x; ++bx) {
      std::array<double, kBlockDim> block{};
      int k = 0;
      for (int cy = 0; cy < kBlockCells; ++cy)
        for (int cx = 0; cx < kBlockCells; ++cx)
          for (double v : cells[static_cast<std::size_t>(by + cy) * cells_x + bx + cx]) block[k++] = v;
      double norm2 = 0.0;
      for (double v : block) norm2 += v * v;
      const double scale = norm2 > 0.0 ? 1.0 / (std::sqrt(norm2) + kNormEpsilon) : 0.0;
      for (double v : block) out.values.push_back(v * scale);
    }
  }
  return out;
}

}  // namespace fundus::descriptors
