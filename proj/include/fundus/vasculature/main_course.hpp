#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <vector>

#include "fundus/imaging/raster.hpp"

namespace fundus::vasculature {

struct WeightedPoint {
  double x = 0.0;
  double y = 0.0;
  double weight = 0.0;
};

struct MainCoursePoints {
  std::vector<WeightedPoint> points;
  double threshold = 0.0;
};

/// Skeleton pixels weighted by vessel half-thickness; keeps those at or above
/// the weight at which the heaviest points first account for `retention`
/// of the total skeleton weight. Coordinates are pixel centres.
inline MainCoursePoints extract_main_course(const imaging::Mask& skeleton, const imaging::Raster& dist,
                                            double retention = 0.35) {
  if (skeleton.width() != dist.width() || skeleton.height() != dist.height())
    throw invalid_input("extract_main_course: skeleton and distance map differ in size");
  if (!(retention > 0.0) || retention > 1.0) throw invalid_input("extract_main_course: retention must lie in (0, 1]");

  std::vector<WeightedPoint> all;
  for (int y = 0; y < skeleton.height(); ++y)
    for (int x = 0; x < skeleton.width(); ++x)
      if (skeleton.at(x, y) && dist.at(x, y) > 0.0 && std::isfinite(dist.at(x, y)))
        all.push_back({x + 0.5, y + 0.5, dist.at(x, y)});
  MainCoursePoints out;
  if (all.empty()) return out;

  std::vector<double> weights;
  weights.reserve(all.size());
  double total = 0.0;
  for (const auto& p : all) {
    weights.push_back(p.weight);
    total += p.weight;
  }
  std::sort(weights.begin(), weights.end(), std::greater<>());
  double cumulative = 0.0;
  out.threshold = weights.back();
  for (double wgt : weights) {
    cumulative += wgt;
    if (cumulative >= retention * total) {
      out.threshold = wgt;
      break;
    }
  }
  for (const auto& p : all)
    if (p.weight >= out.threshold) out.points.push_back(p);
  return out;
}

inline void save_points_csv(const std::string& path, const MainCoursePoints& pts) {
  std::ofstream os(path);
  if (!os) throw io_error("cannot open " + path + " for writing");
  os << "x,y,weight\n";
  for (const auto& p : pts.points) os << p.x << ',' << p.y << ',' << p.weight << '\n';
}

}  // namespace fundus::vasculature
