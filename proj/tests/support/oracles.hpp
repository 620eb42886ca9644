#pragma once

// Straightforward reference implementations used to check the optimised
// library code. They share no code with the library.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace oracle {

struct Lab3 {
  double L, a, b;
};

inline double h(double q) {
  if (q > 0.008856) return std::pow(q, 1.0 / 3.0);
  return 7.787 * q + 16.0 / 116.0;
}

inline Lab3 lab(double R, double G, double B) {
  const double M[3][3] = {{0.4887180, 0.3106803, 0.2006017},
                          {0.1762044, 0.8129847, 0.0108109},
                          {0.0000000, 0.0102048, 0.9897952}};
  double xyz[3], white[3];
  for (int i = 0; i < 3; ++i) {
    xyz[i] = M[i][0] * R + M[i][1] * G + M[i][2] * B;
    white[i] = M[i][0] + M[i][1] + M[i][2];
  }
  const double fx = h(xyz[0] / white[0]), fy = h(xyz[1] / white[1]), fz = h(xyz[2] / white[2]);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

// Image stored as planes[c][y * w + x].
struct Planes {
  int w = 0, h = 0;
  std::array<std::vector<double>, 3> c;
};

// Mean vector of the square of side `size` whose top-left corner is
// (x - size/2, y - size/2), restricted to the image.
inline std::array<double, 3> box_mean(const Planes& img, int x, int y, int size) {
  std::array<double, 3> s{0, 0, 0};
  int n = 0;
  for (int yy = y - size / 2; yy < y - size / 2 + size; ++yy)
    for (int xx = x - size / 2; xx < x - size / 2 + size; ++xx) {
      if (xx < 0 || yy < 0 || xx >= img.w || yy >= img.h) continue;
      for (int k = 0; k < 3; ++k) s[k] += img.c[k][yy * img.w + xx];
      ++n;
    }
  for (auto& v : s) v /= n;
  return s;
}

inline std::vector<double> saliency(const Planes& img, const std::vector<int>& outer_sizes, int inner = 9) {
  std::vector<double> out(static_cast<std::size_t>(img.w) * img.h, 0.0);
  for (int y = 0; y < img.h; ++y)
    for (int x = 0; x < img.w; ++x) {
      const auto a = box_mean(img, x, y, inner);
      for (int s : outer_sizes) {
        const auto b = box_mean(img, x, y, s);
        out[y * img.w + x] += std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) +
                                        (a[2] - b[2]) * (a[2] - b[2]));
      }
    }
  return out;
}

// EM for P(z), P(d|z), P(w|z) with nested vectors. `resp[d][w][z]` seeds the
// first M step. Returns the log-likelihood after every M step.
struct EmResult {
  std::vector<double> trace;
  std::vector<double> pz;
  std::vector<std::vector<double>> pdz, pwz;  // [z][d], [z][w]
};

inline EmResult plsa_em(const std::vector<std::vector<double>>& n, std::vector<std::vector<std::vector<double>>> resp,
                        int iterations) {
  const std::size_t D = n.size(), W = n[0].size(), Z = resp[0][0].size();
  EmResult r;
  r.pz.assign(Z, 0.0);
  r.pdz.assign(Z, std::vector<double>(D, 0.0));
  r.pwz.assign(Z, std::vector<double>(W, 0.0));
  double R = 0.0;
  for (const auto& row : n)
    for (double v : row) R += v;

  auto m_step = [&] {
    for (std::size_t z = 0; z < Z; ++z) {
      double mass = 0.0;
      for (std::size_t d = 0; d < D; ++d)
        for (std::size_t w = 0; w < W; ++w) mass += n[d][w] * resp[d][w][z];
      for (std::size_t w = 0; w < W; ++w) {
        double s = 0.0;
        for (std::size_t d = 0; d < D; ++d) s += n[d][w] * resp[d][w][z];
        r.pwz[z][w] = s / mass;
      }
      for (std::size_t d = 0; d < D; ++d) {
        double s = 0.0;
        for (std::size_t w = 0; w < W; ++w) s += n[d][w] * resp[d][w][z];
        r.pdz[z][d] = s / mass;
      }
      r.pz[z] = mass / R;
    }
  };
  auto loglik = [&] {
    double ll = 0.0;
    for (std::size_t d = 0; d < D; ++d)
      for (std::size_t w = 0; w < W; ++w) {
        if (n[d][w] == 0.0) continue;
        double p = 0.0;
        for (std::size_t z = 0; z < Z; ++z) p += r.pz[z] * r.pdz[z][d] * r.pwz[z][w];
        ll += n[d][w] * std::log(p);
      }
    return ll;
  };
  auto e_step = [&] {
    for (std::size_t d = 0; d < D; ++d)
      for (std::size_t w = 0; w < W; ++w) {
        double den = 0.0;
        for (std::size_t z = 0; z < Z; ++z) den += r.pz[z] * r.pdz[z][d] * r.pwz[z][w];
        for (std::size_t z = 0; z < Z; ++z) resp[d][w][z] = r.pz[z] * r.pdz[z][d] * r.pwz[z][w] / den;
      }
  };

  m_step();
  r.trace.push_back(loglik());
  for (int it = 0; it < iterations; ++it) {
    e_step();
    m_step();
    r.trace.push_back(loglik());
  }
  return r;
}

// Euclidean distance from every foreground pixel to the nearest background
// pixel by exhaustive search; background is 0, no background gives +inf.
inline std::vector<double> distance_transform(const std::vector<bool>& fg, int w, int h) {
  std::vector<double> out(fg.size(), 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!fg[y * w + x]) continue;
      long best = std::numeric_limits<long>::max();
      for (int yy = 0; yy < h; ++yy)
        for (int xx = 0; xx < w; ++xx)
          if (!fg[yy * w + xx]) best = std::min<long>(best, long(xx - x) * (xx - x) + long(yy - y) * (yy - y));
      out[y * w + x] = best == std::numeric_limits<long>::max() ? std::numeric_limits<double>::infinity()
                                                                : std::sqrt(static_cast<double>(best));
    }
  return out;
}

}  // namespace oracle
