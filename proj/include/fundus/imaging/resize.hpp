#pragma once

#include <algorithm>
#include <cmath>

#include "fundus/imaging/raster.hpp"

namespace fundus::imaging {

/// Bilinear resampling with pixel-center alignment (source coordinate
/// (x + 0.5) * in/out - 0.5, clamped to the border). Same-size resizes return
/// an exact copy.
inline Raster resize_bilinear(const Raster& img, int out_w, int out_h) {
  if (out_w < 1 || out_h < 1)
    throw invalid_input("resize_bilinear: target dimensions must be positive");
  if (out_w == img.width() && out_h == img.height()) return img;

  Raster out(out_w, out_h, img.channels());
  const double sx = static_cast<double>(img.width()) / out_w;
  const double sy = static_cast<double>(img.height()) / out_h;

  struct Tap {
    int i0, i1;
    double t;
  };
  auto taps = [](int n_out, int n_in, double scale) {
    std::vector<Tap> v(n_out);
    for (int i = 0; i < n_out; ++i) {
      double s = std::clamp((i + 0.5) * scale - 0.5, 0.0, static_cast<double>(n_in - 1));
      int i0 = static_cast<int>(std::floor(s));
      int i1 = std::min(i0 + 1, n_in - 1);
      v[i] = {i0, i1, s - i0};
    }
    return v;
  };
  const auto tx = taps(out_w, img.width(), sx);
  const auto ty = taps(out_h, img.height(), sy);

  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < out_h; ++y) {
      const Tap& vy = ty[y];
      for (int x = 0; x < out_w; ++x) {
        const Tap& vx = tx[x];
        const double top = img.at(vx.i0, vy.i0, c) + vx.t * (img.at(vx.i1, vy.i0, c) - img.at(vx.i0, vy.i0, c));
        const double bot = img.at(vx.i0, vy.i1, c) + vx.t * (img.at(vx.i1, vy.i1, c) - img.at(vx.i0, vy.i1, c));
        out.at(x, y, c) = top + vy.t * (bot - top);
      }
    }
  }
  return out;
}

}  // namespace fundus::imaging
