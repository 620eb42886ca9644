#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fundus/pipeline/annotations.hpp"
#include "fundus/pipeline/detect.hpp"
#include "fundus/pipeline/report.hpp"

namespace fundus::pipeline {

struct ImageScore {
  std::string image;
  bool od_evaluated = false;
  bool od_correct = false;
  double od_error = 0.0;   // pixels; only meaningful when the disc was found
  double od_radius = 0.0;  // acceptance radius used
  bool fovea_evaluated = false;
  bool fovea_correct = false;
  double fovea_error = 0.0;
};

struct Evaluation {
  std::vector<ImageScore> images;  // sorted by image id
  int od_evaluated = 0;
  int od_correct = 0;
  int fovea_evaluated = 0;
  int fovea_correct = 0;
  std::vector<std::string> warnings;  // one per skipped image or annotation

  int skipped() const { return static_cast<int>(warnings.size()); }
  double od_accuracy() const { return od_evaluated ? static_cast<double>(od_correct) / od_evaluated : 0.0; }
  double fovea_accuracy() const { return fovea_evaluated ? static_cast<double>(fovea_correct) / fovea_evaluated : 0.0; }
};

/// Fovea tolerance in disc diameters.
inline constexpr double kFoveaToleranceInDiameters = 1.0;

/// File name without directory and extension; reports and annotations are
/// matched on it.
inline std::string image_key(const std::string& name) { return std::filesystem::path(name).stem().string(); }

/// Scores one prediction. The disc counts when its centre lies within the
/// annotated radius, or within half the predicted (clamped) diameter when no
/// radius is given. The fovea counts within one disc diameter, taken from
/// the annotated radius when present.
inline ImageScore score_image(const LandmarkReport& r, const GroundTruth& g) {
  ImageScore s;
  s.image = image_key(r.image_id);
  if (g.od_center) {
    s.od_evaluated = true;
    s.od_radius = g.od_radius ? *g.od_radius : 0.5 * r.od.diameter;
    if (r.od.found) {
      s.od_error = imaging::distance(r.od.center, *g.od_center);
      s.od_correct = s.od_error <= s.od_radius;
    }
  }
  if (g.fovea) {
    s.fovea_evaluated = true;
    const double D = g.od_radius ? 2.0 * *g.od_radius : r.od.diameter;
    if (r.fovea.found && D > 0.0) {
      s.fovea_error = imaging::distance(r.fovea.position, *g.fovea);
      s.fovea_correct = s.fovea_error <= kFoveaToleranceInDiameters * D;
    }
  }
  return s;
}

/// Pairs reports with annotations by image key. Reports without an
/// annotation and annotations without a report are skipped with a warning.
inline Evaluation evaluate_reports(const std::vector<LandmarkReport>& reports, const std::vector<GroundTruth>& truth) {
  Evaluation ev;
  std::map<std::string, const GroundTruth*> by_key;
  for (const auto& g : truth) {
    const auto key = image_key(g.image);
    if (!by_key.emplace(key, &g).second) ev.warnings.push_back("duplicate annotation for " + key + "; first kept");
  }
  std::map<std::string, const LandmarkReport*> seen;
  for (const auto& r : reports) {
    const auto key = image_key(r.image_id);
    const auto it = by_key.find(key);
    if (it == by_key.end()) {
      ev.warnings.push_back("no annotation for " + key);
      continue;
    }
    if (!seen.emplace(key, &r).second) {
      ev.warnings.push_back("duplicate report for " + key + "; first kept");
      continue;
    }
    ev.images.push_back(score_image(r, *it->second));
  }
  for (const auto& [key, g] : by_key)
    if (!seen.count(key)) ev.warnings.push_back("no image for annotation " + key);

  std::sort(ev.images.begin(), ev.images.end(), [](const ImageScore& a, const ImageScore& b) { return a.image < b.image; });
  for (const auto& s : ev.images) {
    ev.od_evaluated += s.od_evaluated;
    ev.od_correct += s.od_correct;
    ev.fovea_evaluated += s.fovea_evaluated;
    ev.fovea_correct += s.fovea_correct;
  }
  return ev;
}

inline constexpr const char* kAccuracyHeader =
    "dataset,images,od_evaluated,od_correct,od_accuracy,fovea_evaluated,fovea_correct,fovea_accuracy,skipped";

/// One accuracy row per dataset; an empty evaluation writes no row.
inline void write_accuracy_row(std::ostream& os, const std::string& dataset, const Evaluation& ev) {
  if (ev.images.empty()) return;
  os << dataset << ',' << ev.images.size() << ',' << ev.od_evaluated << ',' << ev.od_correct << ','
     << detail::fixed(100.0 * ev.od_accuracy(), 2) << ',' << ev.fovea_evaluated << ',' << ev.fovea_correct << ','
     << detail::fixed(100.0 * ev.fovea_accuracy(), 2) << ',' << ev.skipped() << '\n';
}

inline constexpr const char* kPerImageHeader = "image,od_correct,od_error,od_radius,fovea_correct,fovea_error";

inline void write_per_image(std::ostream& os, const Evaluation& ev) {
  os << kPerImageHeader << '\n';
  for (const auto& s : ev.images) {
    os << s.image << ',';
    if (s.od_evaluated) os << s.od_correct << ',' << detail::fixed(s.od_error, 2) << ',' << detail::fixed(s.od_radius, 2);
    else os << ",,";
    os << ',';
    if (s.fovea_evaluated) os << s.fovea_correct << ',' << detail::fixed(s.fovea_error, 2);
    else os << ',';
    os << '\n';
  }
}

/// Image files directly inside `dir`, sorted by name.
inline std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw io_error("not a directory: " + dir.string());
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".tif" || ext == ".tiff" || ext == ".ppm")
      out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace fundus::pipeline
