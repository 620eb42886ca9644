#pragma once

#include <array>
#include <utility>
#include <vector>

#include "fundus/imaging/raster.hpp"

namespace fundus::vasculature {

using imaging::Mask;

namespace detail {

// Neighbour order: E, NE, N, NW, W, SW, S, SE.
inline constexpr std::array<int, 8> kDx{1, 1, 0, -1, -1, -1, 0, 1};
inline constexpr std::array<int, 8> kDy{0, -1, -1, -1, 0, 1, 1, 1};

inline std::array<int, 8> neighbourhood(const Mask& m, int x, int y) {
  std::array<int, 8> n{};
  for (int k = 0; k < 8; ++k) {
    const int nx = x + kDx[k], ny = y + kDy[k];
    n[k] = (nx >= 0 && ny >= 0 && nx < m.width() && ny < m.height() && m.at(nx, ny)) ? 1 : 0;
  }
  return n;
}

/// Yokoi connectivity number for 8-connected foreground; a value of one
/// means removing the pixel keeps the local topology.
inline int connectivity8(const std::array<int, 8>& n) {
  int c = 0;
  for (int k = 0; k < 8; k += 2) {
    const int a = 1 - n[k], b = 1 - n[(k + 1) % 8], d = 1 - n[(k + 2) % 8];
    c += a - a * b * d;
  }
  return c;
}

inline bool removable(const Mask& m, int x, int y) {
  const auto n = neighbourhood(m, x, y);
  int count = 0;
  for (int v : n) count += v;
  return count >= 2 && connectivity8(n) == 1;
}

}  // namespace detail

/// Directional thinning: repeated passes peel one layer of border pixels from
/// the north, south, east and west in turn. Each pass marks the border
/// pixels present at its start, then deletes them one by one while they are
/// still simple and not line ends, so the skeleton stays centred, topology
/// (component count) is preserved and a converged skeleton is a fixed point.
inline Mask skeletonize(const Mask& input) {
  Mask m = input;
  constexpr int kBorderDirs[4] = {2, 6, 0, 4};  // N, S, E, W
  std::vector<std::pair<int, int>> marked;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int dir : kBorderDirs) {
      marked.clear();
      for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x) {
          if (!m.at(x, y)) continue;
          const int nx = x + detail::kDx[dir], ny = y + detail::kDy[dir];
          const bool open = nx < 0 || ny < 0 || nx >= m.width() || ny >= m.height() || !m.at(nx, ny);
          if (open && detail::removable(m, x, y)) marked.emplace_back(x, y);
        }
      for (const auto& [x, y] : marked) {
        if (!detail::removable(m, x, y)) continue;
        m.set(x, y, false);
        changed = true;
      }
    }
  }
  return m;
}

}  // namespace fundus::vasculature
