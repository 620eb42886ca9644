#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "fundus/imaging/components.hpp"
#include "fundus/saliency/contrast.hpp"

namespace fundus::saliency {

using imaging::Mask;
using imaging::Point;
using imaging::Rect;

struct InterestMask {
  Mask mask;
  int patch_size = 0;
};

inline int default_patch_size(int width, int height) {
  return std::max(1, std::min(width, height) / 8);
}

/// Tiles the map into non-overlapping square patches and keeps pixels whose
/// patch z-score exceeds one. A patch with zero deviation keeps nothing.
inline InterestMask segment_interest(const Raster& smap, int patch_size = 0) {
  const int w = smap.width(), h = smap.height();
  if (patch_size <= 0) patch_size = default_patch_size(w, h);
  for (double v : smap.data())
    if (!std::isfinite(v)) throw invalid_input("segment_interest: saliency map is not finite");

  InterestMask out{Mask(w, h), patch_size};
  for (int ty = 0; ty < h; ty += patch_size) {
    for (int tx = 0; tx < w; tx += patch_size) {
      const int x1 = std::min(tx + patch_size, w), y1 = std::min(ty + patch_size, h);
      const double n = static_cast<double>(x1 - tx) * (y1 - ty);
      double sum = 0.0;
      for (int y = ty; y < y1; ++y)
        for (int x = tx; x < x1; ++x) sum += smap.at(x, y);
      const double mean = sum / n;
      double ss = 0.0;
      for (int y = ty; y < y1; ++y)
        for (int x = tx; x < x1; ++x) ss += (smap.at(x, y) - mean) * (smap.at(x, y) - mean);
      const double sd = std::sqrt(ss / n);
      if (!(sd > 0.0)) continue;
      for (int y = ty; y < y1; ++y)
        for (int x = tx; x < x1; ++x)
          if ((smap.at(x, y) - mean) / sd > 1.0) out.mask.set(x, y, true);
    }
  }
  return out;
}

inline InterestMask segment_interest(const SaliencyMap& smap, int patch_size = 0) {
  return segment_interest(smap.values, patch_size);
}

/// Validation window geometry: nominal size, plus the scale of the enlarged
/// window. Shifted windows move by half the nominal size along each axis.
struct WindowGeometry {
  int width = 112;
  int height = 122;
  double scale = 1.25;
};

/// Window order within a candidate: centred, shifted left/right/up/down, scaled.
enum class WindowKind { Centered = 0, Left, Right, Up, Down, Scaled };
inline constexpr int kWindowsPerRegion = 6;

struct CandidateRegion {
  Point centroid;  // pixel-centre coordinates
  Point peak;      // centre of the most salient pixel, first in raster order on ties
  Rect bbox;
  std::size_t area = 0;
  double saliency_mass = 0.0;
  std::vector<Rect> windows;          // clipped, WindowKind order
  std::vector<Rect> nominal_windows;  // before clipping
};

inline std::vector<Rect> nominal_windows(Point c, const WindowGeometry& g) {
  const int w = g.width, h = g.height;
  const int cx0 = static_cast<int>(std::lround(c.x - w / 2.0));
  const int cy0 = static_cast<int>(std::lround(c.y - h / 2.0));
  const int fx = static_cast<int>(std::floor(c.x)), cxr = static_cast<int>(std::ceil(c.x));
  const int fy = static_cast<int>(std::floor(c.y)), cyr = static_cast<int>(std::ceil(c.y));
  const int sw = static_cast<int>(std::lround(w * g.scale));
  const int sh = static_cast<int>(std::lround(h * g.scale));
  return {
      {cx0, cy0, w, h},
      {cxr - w, cy0, w, h},  // ends at the centroid: shifted left by half a window
      {fx, cy0, w, h},
      {cx0, cyr - h, w, h},
      {cx0, fy, w, h},
      {static_cast<int>(std::lround(c.x - sw / 2.0)), static_cast<int>(std::lround(c.y - sh / 2.0)), sw, sh},
  };
}

inline std::vector<Rect> candidate_windows(Point c, const WindowGeometry& g, Rect bounds) {
  std::vector<Rect> out;
  out.reserve(kWindowsPerRegion);
  for (const Rect& r : nominal_windows(c, g)) out.push_back(imaging::intersect(r, bounds));
  return out;
}

/// Connected components of the interest mask, heaviest saliency mass first.
inline std::vector<CandidateRegion> extract_candidates(const InterestMask& mask, const Raster& smap,
                                                       const WindowGeometry& geometry = {}) {
  if (mask.mask.width() != smap.width() || mask.mask.height() != smap.height())
    throw invalid_input("extract_candidates: mask and saliency dimensions differ");
  const imaging::Components cc = imaging::label_components(mask.mask);

  struct Acc {
    double sx = 0, sy = 0, mass = 0, top = -1.0;
    int px = 0, py = 0;
    int x0 = 1 << 30, y0 = 1 << 30, x1 = -1, y1 = -1;
    std::size_t n = 0;
  };
  std::vector<Acc> acc(cc.count);
  for (int y = 0; y < cc.height; ++y)
    for (int x = 0; x < cc.width; ++x) {
      const auto l = cc.at(x, y);
      if (l == 0) continue;
      Acc& a = acc[l - 1];
      a.sx += x;
      a.sy += y;
      const double v = smap.at(x, y);
      a.mass += v;
      if (v > a.top) {
        a.top = v;
        a.px = x;
        a.py = y;
      }
      a.x0 = std::min(a.x0, x);
      a.y0 = std::min(a.y0, y);
      a.x1 = std::max(a.x1, x);
      a.y1 = std::max(a.y1, y);
      ++a.n;
    }

  std::vector<CandidateRegion> out;
  out.reserve(acc.size());
  for (const Acc& a : acc) {
    CandidateRegion r;
    r.area = a.n;
    r.centroid = {a.sx / a.n + 0.5, a.sy / a.n + 0.5};
    r.peak = {a.px + 0.5, a.py + 0.5};
    r.bbox = {a.x0, a.y0, a.x1 - a.x0 + 1, a.y1 - a.y0 + 1};
    r.saliency_mass = a.mass;
    r.windows = candidate_windows(r.centroid, geometry, smap.bounds());
    r.nominal_windows = nominal_windows(r.centroid, geometry);
    out.push_back(std::move(r));
  }
  std::stable_sort(out.begin(), out.end(), [](const CandidateRegion& a, const CandidateRegion& b) {
    return a.saliency_mass > b.saliency_mass;
  });
  return out;
}

inline std::vector<CandidateRegion> extract_candidates(const InterestMask& mask, const SaliencyMap& smap,
                                                       const WindowGeometry& geometry = {}) {
  return extract_candidates(mask, smap.values, geometry);
}

}  // namespace fundus::saliency
