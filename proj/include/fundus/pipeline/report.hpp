#pragma once

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fundus/pipeline/detect.hpp"

namespace fundus::pipeline {

using Json = nlohmann::ordered_json;

inline constexpr int kReportSchemaVersion = 1;

namespace detail {

inline Json point_json(Point p) { return Json::array({p.x, p.y}); }

inline Point point_from(const Json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

inline Json rect_json(const Rect& r) { return {{"x", r.x}, {"y", r.y}, {"width", r.width}, {"height", r.height}}; }

inline Rect rect_from(const Json& j) {
  return {j.at("x").get<int>(), j.at("y").get<int>(), j.at("width").get<int>(), j.at("height").get<int>()};
}

}  // namespace detail

/// One JSON document per image. Timings are left out unless asked for so that
/// repeated runs produce identical bytes.
inline Json report_to_json(const LandmarkReport& r, bool with_timings = false) {
  Json od = {{"found", r.od.found},
             {"center", r.od.found ? detail::point_json(r.od.center) : Json()},
             {"diameter", r.od.found ? Json(r.od.diameter) : Json()},
             {"score", r.od.score},
             {"candidate_rank", r.od.candidate_rank},
             {"candidates_examined", r.od.candidates_examined},
             {"window", r.od.found ? detail::rect_json(r.od.window) : Json()},
             {"memberships", r.od.memberships}};

  Json fovea = {{"found", r.fovea.found},
                {"position", r.fovea.found ? detail::point_json(r.fovea.position) : Json()},
                {"clipped", r.fovea.clipped},
                {"weak_axis", r.fovea.weak_axis},
                {"main_course_points", r.fovea.main_course_points}};
  if (r.fovea.fit) {
    const auto& f = *r.fovea.fit;
    fovea["parabola"] = {{"vertex", detail::point_json(f.vertex)},
                         {"p", f.p},
                         {"phi", f.phi},
                         {"rss", f.rss},
                         {"opening_support", f.opening_support}};
  } else {
    fovea["parabola"] = nullptr;
  }
  fovea["failure"] = r.fovea.failure.empty() ? Json() : Json(r.fovea.failure);

  Json macula;
  if (r.macula) {
    macula = {{"fovea", detail::point_json(r.macula->fovea)},
              {"window", detail::rect_json(r.macula->window)},
              {"template_error", r.macula->template_error},
              {"suspicious", r.macula->suspicious}};
  }

  Json j = {{"schema_version", kReportSchemaVersion},
            {"image", r.image_id},
            {"width", r.width},
            {"height", r.height},
            {"optic_disc", std::move(od)},
            {"fovea", std::move(fovea)},
            {"macula", std::move(macula)}};
  if (with_timings) {
    Json t = Json::object();
    for (const auto& [stage, ms] : r.timings_ms) t[stage] = ms;
    j["timings_ms"] = std::move(t);
  }
  return j;
}

inline LandmarkReport report_from_json(const Json& j) {
  try {
    if (j.at("schema_version").get<int>() != kReportSchemaVersion)
      throw format_error("report: unsupported schema version " + j.at("schema_version").dump());
    LandmarkReport r;
    r.image_id = j.at("image").get<std::string>();
    r.width = j.at("width").get<int>();
    r.height = j.at("height").get<int>();

    const Json& od = j.at("optic_disc");
    r.od.found = od.at("found").get<bool>();
    if (r.od.found) {
      r.od.center = detail::point_from(od.at("center"));
      r.od.diameter = od.at("diameter").get<double>();
      r.od.window = detail::rect_from(od.at("window"));
    }
    r.od.score = od.at("score").get<double>();
    r.od.candidate_rank = od.at("candidate_rank").get<int>();
    r.od.candidates_examined = od.at("candidates_examined").get<int>();
    r.od.memberships = od.at("memberships").get<std::vector<double>>();

    const Json& fv = j.at("fovea");
    r.fovea.found = fv.at("found").get<bool>();
    if (r.fovea.found) r.fovea.position = detail::point_from(fv.at("position"));
    r.fovea.clipped = fv.at("clipped").get<bool>();
    r.fovea.weak_axis = fv.at("weak_axis").get<bool>();
    r.fovea.main_course_points = fv.at("main_course_points").get<std::size_t>();
    if (const Json& p = fv.at("parabola"); !p.is_null()) {
      vasculature::ParabolaFit f;
      f.vertex = detail::point_from(p.at("vertex"));
      f.p = p.at("p").get<double>();
      f.phi = p.at("phi").get<double>();
      f.rss = p.at("rss").get<double>();
      f.opening_support = p.at("opening_support").get<double>();
      r.fovea.fit = f;
    }
    if (const Json& f = fv.at("failure"); !f.is_null()) r.fovea.failure = f.get<std::string>();

    if (const Json& m = j.at("macula"); !m.is_null()) {
      r.macula = vasculature::MaculaAssessment{detail::point_from(m.at("fovea")), detail::rect_from(m.at("window")),
                                               m.at("template_error").get<double>(), m.at("suspicious").get<bool>()};
    }
    if (j.contains("timings_ms"))
      for (const auto& [stage, ms] : j.at("timings_ms").items()) r.timings_ms.emplace_back(stage, ms.get<double>());
    return r;
  } catch (const Json::exception& e) {
    throw format_error(std::string("report: ") + e.what());
  }
}

inline void save_report(const std::string& path, const LandmarkReport& r, bool with_timings = false) {
  std::ofstream os(path);
  if (!os) throw io_error("cannot write " + path);
  os << report_to_json(r, with_timings).dump(2) << '\n';
  if (!os) throw io_error("write failed: " + path);
}

inline LandmarkReport load_report(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw io_error("cannot open " + path);
  Json j;
  try {
    is >> j;
  } catch (const Json::exception& e) {
    throw format_error(path + ": " + e.what());
  }
  return report_from_json(j);
}

inline constexpr const char* kSummaryHeader =
    "image,od_found,od_x,od_y,od_diameter,od_score,fovea_found,fovea_x,fovea_y,macula_error,macula_suspicious";

namespace detail {

inline std::string fixed(double v, int digits = 3) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

}  // namespace detail

/// One CSV line per report; unknown values are left blank.
inline void write_summary_csv(std::ostream& os, const std::vector<LandmarkReport>& reports) {
  os << kSummaryHeader << '\n';
  for (const auto& r : reports) {
    os << r.image_id << ',' << (r.od.found ? 1 : 0) << ',';
    if (r.od.found)
      os << detail::fixed(r.od.center.x) << ',' << detail::fixed(r.od.center.y) << ',' << detail::fixed(r.od.diameter);
    else
      os << ",,";
    os << ',' << detail::fixed(r.od.score, 4) << ',' << (r.fovea.found ? 1 : 0) << ',';
    if (r.fovea.found)
      os << detail::fixed(r.fovea.position.x) << ',' << detail::fixed(r.fovea.position.y);
    else
      os << ',';
    os << ',';
    if (r.macula) os << detail::fixed(r.macula->template_error, 4) << ',' << (r.macula->suspicious ? 1 : 0);
    else os << ',';
    os << '\n';
  }
}

}  // namespace fundus::pipeline
