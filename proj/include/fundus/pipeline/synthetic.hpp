#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "fundus/imaging/raster.hpp"

namespace fundus::pipeline {

using imaging::Point;
using imaging::Raster;

/// A drawn vessel: polyline with linearly tapering width and a darkening
/// strength in [0, 1].
struct VesselStroke {
  std::vector<Point> path;
  double width_start = 1.0;
  double width_end = 1.0;
  double darkness = 0.5;
};

struct Lesion {
  Point center;
  double radius = 0.0;
  bool bright = true;  // exudate; otherwise haemorrhage
};

/// Geometry and appearance of one synthetic fundus photograph. The main
/// arcades are vessels[0] and vessels[1] and follow the parabola
/// (vertex od_center, rotation axis_phi, focal parameter focal_p) exactly.
struct SyntheticScene {
  int width = 0;
  int height = 0;
  Point field_center;
  double field_radius = 0.0;
  Point od_center;
  double od_diameter = 0.0;
  double axis_phi = 0.0;
  double focal_p = 0.0;
  Point fovea;
  std::vector<VesselStroke> vessels;
  std::vector<Lesion> lesions;
  std::array<double, 3> background{0.78, 0.33, 0.13};
  std::vector<std::array<double, 4>> shading;  // x, y, sigma, amplitude
  bool degenerated_macula = false;
  std::uint64_t noise_seed = 0;
};

struct SynthOptions {
  int width = 1500;
  int height = 1152;
  double lesion_probability = 0.6;
  double noise_sigma = 0.006;
};

namespace detail {

inline Point parabola_point(const SyntheticScene& s, double lateral) {
  const double c = std::cos(s.axis_phi), sn = std::sin(s.axis_phi);
  const double axial = lateral * lateral / (4.0 * s.focal_p);
  return {s.od_center.x + lateral * c - axial * sn, s.od_center.y + lateral * sn + axial * c};
}

inline bool inside_field(const SyntheticScene& s, Point p, double margin) {
  return imaging::distance(p, s.field_center) < s.field_radius - margin;
}

inline double smoothstep(double edge0, double edge1, double x) {
  const double t = std::clamp((x - edge0) / (edge1 - edge0), 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

inline void add_arcade(SyntheticScene& s, double sign, double axial_end) {
  VesselStroke v;
  v.width_start = 11.0 * s.od_diameter / 160.0;
  v.width_end = 7.0 * s.od_diameter / 160.0;
  v.darkness = 0.5;
  const double s_end = std::sqrt(4.0 * s.focal_p * axial_end);
  for (double lat = 0.0; lat <= s_end; lat += 0.25) {
    const Point p = parabola_point(s, sign * lat);
    if (!inside_field(s, p, 8.0)) break;
    v.path.push_back(p);
  }
  s.vessels.push_back(std::move(v));
}

inline VesselStroke curved_vessel(Point from, double angle, double length, double bend, double w0, double w1,
                                  double darkness, const SyntheticScene& s) {
  VesselStroke v{{}, w0, w1, darkness};
  const Point dir{std::cos(angle), std::sin(angle)}, perp{-dir.y, dir.x};
  const int steps = std::max(2, static_cast<int>(length));
  for (int i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) / steps;
    const Point p{from.x + t * length * dir.x + bend * t * t * length * perp.x,
                  from.y + t * length * dir.y + bend * t * t * length * perp.y};
    if (!inside_field(s, p, 8.0)) break;
    v.path.push_back(p);
  }
  return v;
}

}  // namespace detail

/// Scene `index` of the stream for `seed`. Index 0 is a fixed reference
/// layout (disc at 54.1 % / 46.9 % of the frame, diameter 10.7 % of the
/// width, fovea due left); other indices are randomised.
inline SyntheticScene make_scene(std::uint64_t seed, int index, const SynthOptions& opt = {}) {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(index) * 0xBF58476D1CE4E5B9ull + 1);
  auto uni = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };

  SyntheticScene s;
  s.width = opt.width;
  s.height = opt.height;
  const double W = opt.width, H = opt.height;
  s.field_center = {W / 2.0, H / 2.0};
  s.field_radius = 0.49 * std::min(W, H);

  Point axis;
  if (index == 0) {
    s.od_diameter = W * 160.0 / 1500.0;
    s.od_center = {W * 812.0 / 1500.0, H * 540.0 / 1152.0};
    axis = {-1.0, 0.0};
  } else {
    s.od_diameter = uni(0.093, 0.12) * W;
    const double side = uni(0.0, 1.0) < 0.5 ? -1.0 : 1.0;
    const double alpha = uni(-0.15, 0.15);
    axis = {-side * std::cos(alpha), std::sin(alpha)};
    // The disc sits between the field centre and 1.6 D nasal of it.
    const double nasal = uni(0.2, 1.6) * s.od_diameter;
    const Point mid{s.field_center.x + uni(-0.02, 0.02) * W, s.field_center.y + uni(-0.04, 0.04) * H};
    s.od_center = {mid.x - nasal * axis.x, mid.y - nasal * axis.y};
  }
  const double D = s.od_diameter;
  s.axis_phi = std::atan2(-axis.x, axis.y);
  s.fovea = {s.od_center.x + 2.5 * D * axis.x, s.od_center.y + 2.5 * D * axis.y};
  const double lateral_at_fovea = uni(1.45, 1.8) * D;
  s.focal_p = lateral_at_fovea * lateral_at_fovea / (4.0 * 2.5 * D);

  for (int c = 0; c < 3; ++c) s.background[c] *= uni(0.92, 1.08);
  for (int k = 0; k < 6; ++k)
    s.shading.push_back({uni(0.0, W), uni(0.0, H), uni(0.12, 0.3) * W, uni(-0.06, 0.06)});

  // Main arcades first, then nasal vessels, then arcade side branches.
  detail::add_arcade(s, 1.0, uni(3.2, 3.8) * D);
  detail::add_arcade(s, -1.0, uni(3.2, 3.8) * D);
  const double back = std::atan2(-axis.y, -axis.x);
  for (double offset : {-1.2, -0.45, 0.45, 1.2}) {
    s.vessels.push_back(detail::curved_vessel(s.od_center, back + offset + uni(-0.17, 0.17), uni(1.3, 2.0) * D,
                                              uni(-0.15, 0.15), 5.0 * D / 160.0, 3.0 * D / 160.0, 0.42, s));
  }
  const Point lateral{std::cos(s.axis_phi), std::sin(s.axis_phi)};
  for (int arcade = 0; arcade < 2; ++arcade) {
    const auto path = s.vessels[arcade].path;
    const double sign = arcade == 0 ? 1.0 : -1.0;
    for (double frac : {0.35, 0.6, 0.85}) {
      const std::size_t i = static_cast<std::size_t>(frac * (path.size() - 1));
      if (i + 1 >= path.size()) continue;
      Point t{path[i + 1].x - path[i].x, path[i + 1].y - path[i].y};
      const double tl = std::hypot(t.x, t.y);
      // Bending the tangent towards the outer side keeps branches off the macula.
      const Point dir{t.x / tl + sign * lateral.x, t.y / tl + sign * lateral.y};
      s.vessels.push_back(detail::curved_vessel(path[i], std::atan2(dir.y, dir.x) + uni(-0.2, 0.2),
                                                uni(0.4, 0.8) * D, uni(-0.2, 0.2), 4.0 * D / 160.0,
                                                2.0 * D / 160.0, 0.36, s));
    }
  }

  if (index != 0 && uni(0.0, 1.0) < opt.lesion_probability) {
    const int exudates = std::uniform_int_distribution<int>(1, 6)(rng);
    const int haemorrhages = std::uniform_int_distribution<int>(0, 4)(rng);
    for (int k = 0; k < exudates + haemorrhages; ++k) {
      for (int attempt = 0; attempt < 50; ++attempt) {
        const double rr = s.field_radius * std::sqrt(uni(0.0, 0.8));
        const double th = uni(0.0, 2.0 * std::numbers::pi);
        const Point c{s.field_center.x + rr * std::cos(th), s.field_center.y + rr * std::sin(th)};
        const double radius = k < exudates ? uni(6.0, 16.0) : uni(5.0, 14.0);
        if (imaging::distance(c, s.od_center) < 1.2 * D + radius) continue;
        s.lesions.push_back({c, radius, k < exudates});
        break;
      }
    }
  }
  s.noise_seed = rng();
  return s;
}

/// Rasterises a scene to RGB in [0, 1]. Pixel (i, j) samples the scene at
/// its centre (i + 0.5, j + 0.5).
inline Raster render_scene(const SyntheticScene& s, const SynthOptions& opt = {}) {
  const int W = s.width, H = s.height;
  const double D = s.od_diameter, R = D / 2.0;
  Raster img(W, H, 3);

  // Vessel opacity buffer; overlapping strokes take the strongest.
  std::vector<float> alpha(static_cast<std::size_t>(W) * H, 0.0f);
  for (const VesselStroke& v : s.vessels) {
    const std::size_t n = v.path.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const Point a = v.path[i], b = v.path[i + 1];
      const double t = n > 2 ? static_cast<double>(i) / (n - 2) : 0.0;
      const double half = 0.5 * (v.width_start + t * (v.width_end - v.width_start));
      const int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - half - 2)));
      const int x1 = std::min(W - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + half + 2)));
      const int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - half - 2)));
      const int y1 = std::min(H - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + half + 2)));
      const double ex = b.x - a.x, ey = b.y - a.y, len2 = ex * ex + ey * ey;
      for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
          const double px = x + 0.5 - a.x, py = y + 0.5 - a.y;
          const double u = len2 > 0 ? std::clamp((px * ex + py * ey) / len2, 0.0, 1.0) : 0.0;
          const double d = std::hypot(px - u * ex, py - u * ey);
          const double cover = std::clamp(half + 0.5 - d, 0.0, 1.0) * v.darkness;
          float& dst = alpha[static_cast<std::size_t>(y) * W + x];
          dst = std::max(dst, static_cast<float>(cover));
        }
    }
  }

  std::mt19937_64 noise_rng(s.noise_seed);
  std::normal_distribution<double> noise(0.0, opt.noise_sigma);
  const double macula_sigma = 0.55 * D, pit_sigma = 0.1 * D;
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const Point p{x + 0.5, y + 0.5};
      std::array<double, 3> c{0.0, 0.0, 0.0};
      const double rf = imaging::distance(p, s.field_center);
      const double field = 1.0 - detail::smoothstep(s.field_radius - 2.0, s.field_radius + 2.0, rf);
      if (field > 0.0) {
        double shade = 1.0 - 0.3 * (rf / s.field_radius) * (rf / s.field_radius);
        for (const auto& g : s.shading) {
          const double dx = p.x - g[0], dy = p.y - g[1];
          shade += g[3] * std::exp(-(dx * dx + dy * dy) / (2.0 * g[2] * g[2]));
        }
        const double rm2 = (p.x - s.fovea.x) * (p.x - s.fovea.x) + (p.y - s.fovea.y) * (p.y - s.fovea.y);
        shade *= 1.0 - 0.32 * std::exp(-rm2 / (2.0 * macula_sigma * macula_sigma)) -
                 0.06 * std::exp(-rm2 / (2.0 * pit_sigma * pit_sigma));
        for (int k = 0; k < 3; ++k) c[k] = s.background[k] * shade;

        const double rd = imaging::distance(p, s.od_center);
        const double disc = 1.0 - detail::smoothstep(R - 4.0, R + 4.0, rd);
        const double cup = 1.0 - detail::smoothstep(0.35 * R - 6.0, 0.35 * R + 6.0, rd);
        constexpr std::array<double, 3> disc_rgb{1.0, 0.88, 0.62}, cup_rgb{1.0, 0.96, 0.85};
        for (int k = 0; k < 3; ++k) {
          c[k] = c[k] + disc * (disc_rgb[k] - c[k]);
          c[k] = c[k] + cup * (cup_rgb[k] - c[k]);
        }

        for (const Lesion& l : s.lesions) {
          const double a = 1.0 - detail::smoothstep(l.radius - 3.0, l.radius + 3.0, imaging::distance(p, l.center));
          if (a <= 0.0) continue;
          if (l.bright) {
            constexpr std::array<double, 3> ex{1.0, 0.95, 0.55};
            for (int k = 0; k < 3; ++k) c[k] += a * (ex[k] - c[k]);
          } else {
            constexpr std::array<double, 3> hm{0.6, 0.35, 0.35};
            for (int k = 0; k < 3; ++k) c[k] *= 1.0 - a * (1.0 - hm[k]);
          }
        }
        if (s.degenerated_macula) {
          const double a = 1.0 - detail::smoothstep(0.22 * D - 4.0, 0.22 * D + 4.0, imaging::distance(p, s.fovea));
          constexpr std::array<double, 3> ex{1.0, 0.93, 0.6};
          for (int k = 0; k < 3; ++k) c[k] += a * (ex[k] - c[k]);
        }

        const double v = alpha[static_cast<std::size_t>(y) * W + x];
        constexpr std::array<double, 3> absorb{0.55, 0.8, 0.7};
        for (int k = 0; k < 3; ++k) c[k] *= field * (1.0 - absorb[k] * v);
      }
      for (int k = 0; k < 3; ++k) img.at(x, y, k) = std::clamp(c[k] + noise(noise_rng), 0.0, 1.0);
    }
  }
  return img;
}

/// Rounds samples to 8-bit levels, as a PNG round trip would.
inline Raster quantize8(Raster img) {
  for (double& v : img.data()) v = std::round(std::clamp(v, 0.0, 1.0) * 255.0) / 255.0;
  return img;
}

}  // namespace fundus::pipeline
