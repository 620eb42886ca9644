#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "fundus/imaging/raster.hpp"
#include "fundus/vasculature/main_course.hpp"

namespace fundus::vasculature {

using imaging::Point;

/// y' = x'^2 / (4p) in the frame translated to `vertex` and rotated by `phi`
/// (x' = dx cos phi + dy sin phi, y' = -dx sin phi + dy cos phi). The
/// symmetry axis points along (-sin phi, cos phi); the curve opens that way
/// when p > 0. Fits are returned canonicalised to p > 0, phi in [0, 2pi).
struct ParabolaFit {
  Point vertex;
  double p = 0.0;
  double phi = 0.0;
  double rss = 0.0;
  /// Share of points on the opening side of the vertex; values near 0.5
  /// mean the opening direction is weakly determined.
  double opening_support = 1.0;
  std::vector<double> objective_trace;  // rss over Gauss-Newton polishing
};

inline constexpr std::size_t kMinParabolaPoints = 6;

struct ParabolaOptions {
  int seeds = 64;
  double angle_tolerance = 1e-12;
  int max_gauss_newton = 50;
};

namespace detail {

struct Frame {
  double c, s;
};

/// Closed-form curvature q = 1/(4p) for a fixed rotation, and its residual.
inline std::pair<double, double> solve_curvature(std::span<const Point> d, double phi) {
  const double c = std::cos(phi), s = std::sin(phi);
  double num = 0.0, den = 0.0;
  for (const Point& v : d) {
    const double xr = v.x * c + v.y * s, yr = -v.x * s + v.y * c;
    num += yr * xr * xr;
    den += xr * xr * xr * xr;
  }
  const double q = den > 0.0 ? num / den : 0.0;
  double rss = 0.0;
  for (const Point& v : d) {
    const double xr = v.x * c + v.y * s, yr = -v.x * s + v.y * c;
    const double r = yr - q * xr * xr;
    rss += r * r;
  }
  return {q, rss};
}

inline double residual_sum(std::span<const Point> d, double q, double phi) {
  const double c = std::cos(phi), s = std::sin(phi);
  double rss = 0.0;
  for (const Point& v : d) {
    const double xr = v.x * c + v.y * s, yr = -v.x * s + v.y * c;
    const double r = yr - q * xr * xr;
    rss += r * r;
  }
  return rss;
}

inline double golden_section(std::span<const Point> d, double lo, double hi, double tol) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = solve_curvature(d, x1).second, f2 = solve_curvature(d, x2).second;
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = solve_curvature(d, x1).second;
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = solve_curvature(d, x2).second;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

/// Least-squares parabola with the vertex pinned at `vertex`.
///
/// The curvature has a closed form for any rotation, so the search runs over
/// the rotation alone: golden-section refinement inside each of `seeds`
/// equal brackets of [0, 2pi), then Gauss-Newton with step halving on
/// (curvature, rotation) from the best bracket. Throws ErrorCode::Degenerate
/// when the points are collinear through the vertex.
inline ParabolaFit fit_parabola(std::span<const Point> points, Point vertex, const ParabolaOptions& opt = {}) {
  if (points.size() < kMinParabolaPoints) throw invalid_input("fit_parabola: need at least 6 points");
  std::vector<Point> d;
  d.reserve(points.size());
  double sxx = 0, sxy = 0, syy = 0;
  for (const Point& p : points) {
    d.push_back({p.x - vertex.x, p.y - vertex.y});
    sxx += d.back().x * d.back().x;
    sxy += d.back().x * d.back().y;
    syy += d.back().y * d.back().y;
  }
  const double tr = sxx + syy, det = sxx * syy - sxy * sxy;
  const double lmin = tr / 2.0 - std::sqrt(std::max(tr * tr / 4.0 - det, 0.0));
  if (!(tr > 0.0) || lmin <= 1e-12 * tr)
    throw Error(ErrorCode::Degenerate, "fit_parabola: points are collinear through the vertex");

  const double step = 2.0 * std::numbers::pi / opt.seeds;
  double best_phi = 0.0, best_rss = std::numeric_limits<double>::infinity();
  for (int k = 0; k < opt.seeds; ++k) {
    const double phi = detail::golden_section(d, k * step - step / 2.0, k * step + step / 2.0, opt.angle_tolerance);
    const double rss = detail::solve_curvature(d, phi).second;
    if (rss < best_rss) {
      best_rss = rss;
      best_phi = phi;
    }
  }

  double q = detail::solve_curvature(d, best_phi).first, phi = best_phi;
  double rss = detail::residual_sum(d, q, phi);
  ParabolaFit fit;
  fit.objective_trace.push_back(rss);
  for (int it = 0; it < opt.max_gauss_newton; ++it) {
    double a11 = 0, a12 = 0, a22 = 0, g1 = 0, g2 = 0;
    const double c = std::cos(phi), s = std::sin(phi);
    for (const Point& v : d) {
      const double xr = v.x * c + v.y * s, yr = -v.x * s + v.y * c;
      const double r = yr - q * xr * xr;
      const double jq = -xr * xr, jphi = -xr - 2.0 * q * xr * yr;
      a11 += jq * jq;
      a12 += jq * jphi;
      a22 += jphi * jphi;
      g1 += jq * r;
      g2 += jphi * r;
    }
    const double det2 = a11 * a22 - a12 * a12;
    if (!(std::abs(det2) > 0.0)) break;
    const double dq = -(a22 * g1 - a12 * g2) / det2;
    const double dphi = -(-a12 * g1 + a11 * g2) / det2;
    double t = 1.0;
    bool improved = false;
    for (int halving = 0; halving < 40; ++halving, t *= 0.5) {
      const double trial = detail::residual_sum(d, q + t * dq, phi + t * dphi);
      if (trial < rss) {
        q += t * dq;
        phi += t * dphi;
        rss = trial;
        improved = true;
        break;
      }
    }
    fit.objective_trace.push_back(rss);
    if (!improved || (std::abs(t * dphi) < 1e-15 && std::abs(t * dq) <= 1e-15 * std::abs(q))) break;
  }

  if (!(std::abs(q) > 0.0)) throw Error(ErrorCode::Degenerate, "fit_parabola: zero curvature");
  if (q < 0.0) {
    q = -q;
    phi += std::numbers::pi;
  }
  phi = std::fmod(phi, 2.0 * std::numbers::pi);
  if (phi < 0.0) phi += 2.0 * std::numbers::pi;

  fit.vertex = vertex;
  fit.p = 1.0 / (4.0 * q);
  fit.phi = phi;
  fit.rss = rss;
  std::size_t opening = 0;
  const double c = std::cos(phi), s = std::sin(phi);
  for (const Point& v : d) opening += (-v.x * s + v.y * c) >= 0.0 ? 1 : 0;
  fit.opening_support = static_cast<double>(opening) / d.size();
  return fit;
}

inline ParabolaFit fit_parabola(const MainCoursePoints& pts, Point vertex, const ParabolaOptions& opt = {}) {
  std::vector<Point> xy;
  xy.reserve(pts.points.size());
  for (const auto& p : pts.points) xy.push_back({p.x, p.y});
  return fit_parabola(xy, vertex, opt);
}

/// Unit vector along the symmetry axis, on the side the parabola opens.
inline Point axis_direction(const ParabolaFit& fit) {
  const double sign = fit.p < 0.0 ? -1.0 : 1.0;
  return {-sign * std::sin(fit.phi), sign * std::cos(fit.phi)};
}

struct FoveaEstimate {
  Point position;
  bool clipped = false;
};

inline constexpr double kFoveaDistanceInDiameters = 2.5;

/// Fovea at 2.5 disc diameters from the vertex along the opening axis,
/// clipped into `bounds` when one is given.
inline FoveaEstimate locate_fovea(const ParabolaFit& fit, double od_diameter, const imaging::Rect* bounds = nullptr) {
  if (!(od_diameter > 0.0)) throw invalid_input("locate_fovea: disc diameter must be positive");
  if (fit.p == 0.0) throw invalid_input("locate_fovea: invalid fit");
  const Point u = axis_direction(fit);
  FoveaEstimate out{{fit.vertex.x + kFoveaDistanceInDiameters * od_diameter * u.x,
                     fit.vertex.y + kFoveaDistanceInDiameters * od_diameter * u.y}};
  if (bounds) {
    const Point clipped{std::clamp(out.position.x, double(bounds->x), double(bounds->right())),
                        std::clamp(out.position.y, double(bounds->y), double(bounds->bottom()))};
    out.clipped = !(clipped == out.position);
    out.position = clipped;
  }
  return out;
}

}  // namespace fundus::vasculature
