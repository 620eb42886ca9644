#pragma once

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fundus/classifier/validation.hpp"
#include "fundus/imaging/components.hpp"
#include "fundus/imaging/field.hpp"
#include "fundus/imaging/integral.hpp"
#include "fundus/pipeline/config.hpp"
#include "fundus/saliency/contrast.hpp"
#include "fundus/saliency/segmentation.hpp"
#include "fundus/vasculature/distance.hpp"
#include "fundus/vasculature/macula.hpp"
#include "fundus/vasculature/main_course.hpp"
#include "fundus/vasculature/parabola.hpp"
#include "fundus/vasculature/skeleton.hpp"
#include "fundus/vasculature/vessels.hpp"

namespace fundus::pipeline {

using imaging::Point;
using imaging::Raster;
using imaging::Rect;

struct OpticDiscResult {
  bool found = false;
  Point center;
  double diameter = 0.0;
  double score = 0.0;        // accepted score, or the best rejected one
  int candidate_rank = -1;   // 0-based rank of the accepted candidate
  int candidates_examined = 0;
  Rect window;
  std::vector<double> memberships;
};

struct FoveaResult {
  bool found = false;
  Point position;
  bool clipped = false;
  bool weak_axis = false;  // opening side poorly supported by the vessel points
  std::optional<vasculature::ParabolaFit> fit;
  std::size_t main_course_points = 0;
  std::string failure;
};

using StageTimings = std::vector<std::pair<std::string, double>>;

struct LandmarkReport {
  std::string image_id;
  int width = 0;
  int height = 0;
  OpticDiscResult od;
  FoveaResult fovea;
  std::optional<vasculature::MaculaAssessment> macula;
  StageTimings timings_ms;
};

struct DetectOptions {
  const Raster* vessel_map = nullptr;       // external binary map; bypasses the segmenter
  const Raster* macula_template = nullptr;  // defaults to the synthetic template
  bool optic_disc_only = false;
};

inline constexpr double kWeakAxisSupport = 0.6;

namespace detail {

class StageClock {
public:
  explicit StageClock(StageTimings& out) : out_(out) {}

  template <class F>
  decltype(auto) run(const char* name, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    struct Record {
      StageTimings& out;
      const char* name;
      std::chrono::steady_clock::time_point t0;
      ~Record() {
        out.emplace_back(name, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
      }
    } record{out_, name, t0};
    return f();
  }

private:
  StageTimings& out_;
};

}  // namespace detail

/// Equivalent-circle diameter of a region, clamped to the configured
/// fraction-of-width range.
inline double disc_diameter(std::size_t area, int image_width, const PipelineConfig& cfg) {
  const double d = std::sqrt(4.0 * static_cast<double>(area) / std::numbers::pi);
  return std::clamp(d, cfg.od_diameter_min * image_width, cfg.od_diameter_max * image_width);
}

struct DiscEstimate {
  Point center;
  std::size_t area = 0;
};

/// Locates the disc plateau near `seed`. Inside a box of half-size `half`,
/// the saliency is box-smoothed with radius `smooth` so that vessels crossing
/// the disc do not cut it apart; pixels above the midpoint between the box
/// minimum and maximum are labelled. The component under the seed, or the
/// one holding the maximum when the seed is below threshold, gives centre
/// and area; it is rejected when the seed lies outside its equivalent circle.
inline std::optional<DiscEstimate> refine_disc(const Raster& smap, Point seed, int half, int smooth) {
  const int cx = static_cast<int>(std::floor(seed.x)), cy = static_cast<int>(std::floor(seed.y));
  const Rect box = imaging::intersect({cx - half, cy - half, 2 * half + 1, 2 * half + 1}, smap.bounds());
  if (box.empty()) return std::nullopt;
  const Raster local = imaging::crop(smap, box);
  const imaging::IntegralImage sat(local.plane(0), box.width, box.height);
  Raster smooth_map(box.width, box.height, 1);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  int mx = 0, my = 0;
  for (int y = 0; y < box.height; ++y)
    for (int x = 0; x < box.width; ++x) {
      const int x0 = std::max(0, x - smooth), x1 = std::min(box.width, x + smooth + 1);
      const int y0 = std::max(0, y - smooth), y1 = std::min(box.height, y + smooth + 1);
      const double v = sat.box_sum(x0, y0, x1, y1) / ((x1 - x0) * (y1 - y0));
      smooth_map.at(x, y) = v;
      lo = std::min(lo, v);
      if (v > hi) {
        hi = v;
        mx = x;
        my = y;
      }
    }
  if (!(hi > lo)) return std::nullopt;
  const double threshold = 0.5 * (lo + hi);
  imaging::Mask m(box.width, box.height);
  for (int y = 0; y < box.height; ++y)
    for (int x = 0; x < box.width; ++x) m.set(x, y, smooth_map.at(x, y) > threshold);
  const auto cc = imaging::label_components(m);
  const int sx0 = cx - box.x, sy0 = cy - box.y;
  const bool seed_inside = sx0 >= 0 && sy0 >= 0 && sx0 < box.width && sy0 < box.height && m.at(sx0, sy0);
  const auto label = seed_inside ? cc.at(sx0, sy0) : cc.at(mx, my);
  double sx = 0.0, sy = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < box.height; ++y)
    for (int x = 0; x < box.width; ++x)
      if (cc.at(x, y) == label) {
        sx += x;
        sy += y;
        ++n;
      }
  const Point center{box.x + sx / n + 0.5, box.y + sy / n + 0.5};
  // the seed has to sit on the plateau, not just see it from the box edge
  if (distance(center, seed) > std::sqrt(static_cast<double>(n) / std::numbers::pi)) return std::nullopt;
  return DiscEstimate{center, n};
}

inline int refine_half_size(const PipelineConfig& cfg) {
  return static_cast<int>(std::lround(1.5 * std::max(cfg.window.width, cfg.window.height)));
}

inline int refine_smoothing(const PipelineConfig& cfg) { return std::max(1, cfg.window.width / 16); }

/// A ranked candidate whose windows sit on `anchor`.
struct Candidate {
  saliency::CandidateRegion region;
  Point anchor;
  std::size_t disc_area = 0;  // pixels behind the diameter estimate
};

/// Field of view shrunk by `field_margin` of the image width.
inline imaging::Mask eroded_field(const Raster& gray, const PipelineConfig& cfg) {
  const imaging::Mask fov = imaging::field_of_view(gray);
  const Raster dist = vasculature::distance_transform(fov);
  const double margin = cfg.field_margin * gray.width();
  imaging::Mask out(gray.width(), gray.height());
  auto m = out.data();
  const auto d = dist.plane(0);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = d[i] > margin ? 1 : 0;
  return out;
}

/// The first `max_candidates` regions by saliency mass, skipping regions
/// whose peak falls outside `field` when one is given. With `refine_disc`
/// each region is anchored on the saliency plateau around its peak instead
/// of its centroid: tile-wise z-scoring often merges the disc with nearby
/// structures, which drags the centroid off the disc.
inline std::vector<Candidate> rank_candidates(const saliency::SaliencyMap& smap, const saliency::InterestMask& mask,
                                              const PipelineConfig& cfg, const imaging::Mask* field = nullptr) {
  auto regions = saliency::extract_candidates(mask, smap, cfg.window);
  if (field) {
    std::erase_if(regions, [&](const saliency::CandidateRegion& r) {
      return !field->at(static_cast<int>(r.peak.x), static_cast<int>(r.peak.y));
    });
  }
  if (regions.size() > static_cast<std::size_t>(cfg.max_candidates)) regions.resize(cfg.max_candidates);
  const int half = refine_half_size(cfg);
  std::vector<Candidate> out;
  out.reserve(regions.size());
  for (auto& r : regions) {
    Candidate c{std::move(r), {}, 0};
    c.anchor = c.region.centroid;
    c.disc_area = c.region.area;
    if (cfg.refine_disc) {
      const auto d = refine_disc(smap.values, c.region.peak, half, refine_smoothing(cfg));
      // a plateau smaller than the smallest disc is a fragment, not the disc
      const double min_d = cfg.od_diameter_min * smap.values.width();
      if (!d || std::sqrt(4.0 * static_cast<double>(d->area) / std::numbers::pi) < min_d) continue;
      c.anchor = d->center;
      c.disc_area = d->area;
      c.region.windows = saliency::candidate_windows(c.anchor, cfg.window, smap.values.bounds());
      c.region.nominal_windows = saliency::nominal_windows(c.anchor, cfg.window);
    }
    out.push_back(std::move(c));
  }
  return out;
}

/// Intermediate products, filled when a caller wants to inspect or dump them.
struct DetectTrace {
  saliency::SaliencyMap saliency;
  saliency::InterestMask interest;
  imaging::Mask field;  // eroded field of view; empty when the filter is off
  std::vector<Candidate> candidates;
  vasculature::VesselMap vessels;
  imaging::Mask skeleton;
  vasculature::MainCoursePoints main_course;
};

/// Keeps the main-course points lying on vessel components that come within
/// `radius` of the disc centre. Isolated dark lesions picked up by the
/// segmenter are not part of the vessel tree and would dominate the squared
/// residuals of the fit.
inline vasculature::MainCoursePoints disc_connected(const vasculature::MainCoursePoints& pts,
                                                    const imaging::Mask& vessels, Point center, double radius) {
  const imaging::Components cc = imaging::label_components(vessels);
  std::vector<char> keep(static_cast<std::size_t>(cc.count) + 1, 0);
  const Rect box = imaging::intersect({static_cast<int>(std::floor(center.x - radius)),
                                       static_cast<int>(std::floor(center.y - radius)),
                                       static_cast<int>(std::ceil(2 * radius)) + 1, static_cast<int>(std::ceil(2 * radius)) + 1},
                                      vessels.bounds());
  for (int y = box.y; y < box.bottom(); ++y)
    for (int x = box.x; x < box.right(); ++x)
      if (const auto l = cc.at(x, y); l > 0 && imaging::distance({x + 0.5, y + 0.5}, center) <= radius) keep[l] = 1;
  vasculature::MainCoursePoints out;
  out.threshold = pts.threshold;
  for (const auto& p : pts.points)
    if (keep[cc.at(static_cast<int>(p.x), static_cast<int>(p.y))]) out.points.push_back(p);
  return out;
}

/// Saliency, candidate ranking and validation; stops at the first candidate
/// that validates.
inline OpticDiscResult locate_optic_disc(const Raster& rgb, const PipelineConfig& cfg,
                                         const classifier::TrainedValidator& validator, detail::StageClock& clock,
                                         DetectTrace& trace) {
  imaging::require_channels(rgb, 3, "detect");
  const auto lab = clock.run("lab", [&] { return imaging::rgb_to_lab(rgb); });
  trace.saliency = clock.run("saliency", [&] { return saliency::multiscale_saliency(lab, cfg.saliency_scales(rgb.width())); });
  trace.interest = clock.run("segment", [&] { return saliency::segment_interest(trace.saliency, cfg.interest_patch); });
  const Raster gray = imaging::to_grayscale(rgb);
  if (cfg.field_filter) trace.field = clock.run("field", [&] { return eroded_field(gray, cfg); });
  trace.candidates = clock.run("candidates", [&] {
    return rank_candidates(trace.saliency, trace.interest, cfg, cfg.field_filter ? &trace.field : nullptr);
  });

  OpticDiscResult od;
  const auto params = cfg.validator_params();
  clock.run("validation", [&] {
    for (std::size_t i = 0; i < trace.candidates.size(); ++i) {
      const Candidate& c = trace.candidates[i];
      const auto verdict = classifier::validate_candidate(c.region, gray, validator, params);
      ++od.candidates_examined;
      if (verdict.is_optic_disc) {
        od.found = true;
        od.center = c.anchor;
        od.diameter = disc_diameter(c.disc_area, rgb.width(), cfg);
        od.score = verdict.aggregate_od_score;
        od.candidate_rank = static_cast<int>(i);
        od.window = verdict.best_window;
        od.memberships = verdict.class_memberships;
        return;
      }
      od.score = std::max(od.score, verdict.aggregate_od_score);
    }
  });
  return od;
}

inline LandmarkReport detect(const Raster& rgb, std::string image_id, const PipelineConfig& cfg,
                             const classifier::TrainedValidator& validator, const DetectOptions& opt = {},
                             DetectTrace* trace_out = nullptr) {
  LandmarkReport report;
  report.image_id = std::move(image_id);
  report.width = rgb.width();
  report.height = rgb.height();
  detail::StageClock clock(report.timings_ms);
  DetectTrace local;
  DetectTrace& trace = trace_out ? *trace_out : local;
  const auto t0 = std::chrono::steady_clock::now();

  report.od = locate_optic_disc(rgb, cfg, validator, clock, trace);
  if (report.od.found && !opt.optic_disc_only) {
    trace.vessels = clock.run("vessels", [&] {
      if (opt.vessel_map) {
        if (opt.vessel_map->width() != rgb.width() || opt.vessel_map->height() != rgb.height())
          throw invalid_input("vessel map dimensions differ from the image");
        return vasculature::vessel_map_from_raster(*opt.vessel_map);
      }
      return vasculature::baseline_segment_vessels(rgb, cfg.segmenter);
    });
    trace.skeleton = clock.run("skeleton", [&] { return vasculature::skeletonize(trace.vessels.binary); });
    const Raster dist = clock.run("distance", [&] { return vasculature::distance_transform(trace.vessels.binary); });
    trace.main_course = clock.run("main_course", [&] {
      auto pts = vasculature::extract_main_course(trace.skeleton, dist, cfg.retention_q);
      if (cfg.disc_connected_vessels) {
        auto connected = disc_connected(pts, trace.vessels.binary, report.od.center, report.od.diameter);
        if (connected.points.size() >= vasculature::kMinParabolaPoints) pts = std::move(connected);
      }
      return pts;
    });
    report.fovea.main_course_points = trace.main_course.points.size();

    clock.run("parabola", [&] {
      try {
        report.fovea.fit = vasculature::fit_parabola(trace.main_course, report.od.center);
      } catch (const Error& e) {
        report.fovea.failure = e.what();
      }
    });
    if (report.fovea.fit) {
      const Rect bounds = rgb.bounds();
      const auto f = vasculature::locate_fovea(*report.fovea.fit, report.od.diameter, &bounds);
      report.fovea.found = true;
      report.fovea.position = f.position;
      report.fovea.clipped = f.clipped;
      report.fovea.weak_axis = report.fovea.fit->opening_support < kWeakAxisSupport;
      clock.run("macula", [&] {
        const Raster templ = opt.macula_template ? *opt.macula_template : vasculature::synthetic_macula_template();
        try {
          report.macula = vasculature::assess_macula(rgb, f.position, report.od.diameter, templ, cfg.macula_threshold);
        } catch (const Error&) {
          report.macula.reset();
        }
      });
    }
  } else if (!report.od.found) {
    report.fovea.failure = "optic disc not found";
  }
  report.timings_ms.emplace_back(
      "total", std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
  return report;
}

}  // namespace fundus::pipeline
