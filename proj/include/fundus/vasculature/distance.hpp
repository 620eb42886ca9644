#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "fundus/imaging/raster.hpp"

namespace fundus::vasculature {

namespace detail {

/// 1-D squared distance transform of a sampled function (lower envelope of
/// parabolas), Felzenszwalb & Huttenlocher.
inline void edt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  constexpr double inf = std::numeric_limits<double>::infinity();
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == inf) continue;
    while (k >= 0) {
      const double s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) / (2.0 * q - 2.0 * v[k]);
      if (s <= z[k]) {
        --k;
        continue;
      }
      break;
    }
    ++k;
    v[k] = q;
    z[k] = k == 0 ? -inf : ((f[q] + double(q) * q) - (f[v[k - 1]] + double(v[k - 1]) * v[k - 1])) /
                               (2.0 * q - 2.0 * v[k - 1]);
    z[k + 1] = inf;
  }
  if (k < 0) {
    std::fill(d.begin(), d.end(), inf);
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    const double dq = q - v[j];
    d[q] = dq * dq + f[v[j]];
  }
}

}  // namespace detail

/// Exact Euclidean distance from every foreground pixel to the nearest
/// background pixel inside the image; background pixels are 0. A map with
/// no background yields +infinity on every pixel.
inline imaging::Raster distance_transform(const imaging::Mask& mask) {
  const int w = mask.width(), h = mask.height();
  constexpr double inf = std::numeric_limits<double>::infinity();
  imaging::Raster out(w, h, 1);
  const int n = std::max(w, h);
  std::vector<double> f(n), d(n), z(n + 1);
  std::vector<int> v(n);

  for (int x = 0; x < w; ++x) {
    f.resize(h);
    d.resize(h);
    for (int y = 0; y < h; ++y) f[y] = mask.at(x, y) ? inf : 0.0;
    detail::edt_1d(f, d, v, z);
    for (int y = 0; y < h; ++y) out.at(x, y) = d[y];
  }
  for (int y = 0; y < h; ++y) {
    f.resize(w);
    d.resize(w);
    for (int x = 0; x < w; ++x) f[x] = out.at(x, y);
    detail::edt_1d(f, d, v, z);
    for (int x = 0; x < w; ++x) out.at(x, y) = std::sqrt(d[x]);
  }
  return out;
}

}  // namespace fundus::vasculature
