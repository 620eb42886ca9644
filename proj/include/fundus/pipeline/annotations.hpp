#pragma once

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "fundus/error.hpp"
#include "fundus/imaging/raster.hpp"
#include "fundus/pipeline/config.hpp"

namespace fundus::pipeline {

/// Expert landmarks for one image. Any field may be unknown.
struct GroundTruth {
  std::string image;
  std::optional<imaging::Point> od_center;
  std::optional<double> od_radius;
  std::optional<imaging::Point> fovea;
};

inline constexpr const char* kAnnotationHeader = "image,od_x,od_y,od_r,fovea_x,fovea_y";

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline std::optional<double> optional_number(const std::string& cell, const std::string& where) {
  if (cell.empty()) return std::nullopt;
  double v = 0.0;
  const auto r = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (r.ec != std::errc() || r.ptr != cell.data() + cell.size()) throw format_error(where + ": bad number '" + cell + "'");
  return v;
}

inline std::optional<imaging::Point> optional_point(const std::string& x, const std::string& y, const std::string& where) {
  const auto px = optional_number(x, where), py = optional_number(y, where);
  if (px.has_value() != py.has_value()) throw format_error(where + ": coordinate pair is half blank");
  if (!px) return std::nullopt;
  return imaging::Point{*px, *py};
}

}  // namespace detail

/// Parses `image,od_x,od_y,od_r,fovea_x,fovea_y` rows; the header line is
/// required, blank cells mean unknown.
inline std::vector<GroundTruth> parse_annotations(std::istream& is, const std::string& source = "annotations") {
  std::string line;
  if (!std::getline(is, line)) throw format_error(source + ": empty file");
  if (detail::trim(line) != kAnnotationHeader) throw format_error(source + ": expected header '" + kAnnotationHeader + "'");
  std::vector<GroundTruth> out;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    auto cells = detail::split_csv_line(detail::trim(line));
    if (cells.size() != 6) throw format_error(where + ": expected 6 columns, found " + std::to_string(cells.size()));
    if (cells[0].empty()) throw format_error(where + ": image name is blank");
    GroundTruth g;
    g.image = cells[0];
    g.od_center = detail::optional_point(cells[1], cells[2], where);
    g.od_radius = detail::optional_number(cells[3], where);
    if (g.od_radius && !(*g.od_radius > 0.0)) throw format_error(where + ": od_r must be positive");
    g.fovea = detail::optional_point(cells[4], cells[5], where);
    out.push_back(std::move(g));
  }
  return out;
}

inline std::vector<GroundTruth> load_annotations(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw io_error("cannot open annotations " + path);
  return parse_annotations(is, path);
}

inline void write_annotations(std::ostream& os, const std::vector<GroundTruth>& rows) {
  os << kAnnotationHeader << '\n';
  std::ostringstream num;
  num.precision(17);
  auto cell = [&](std::optional<double> v) {
    if (!v) return std::string();
    num.str("");
    num << *v;
    return num.str();
  };
  for (const auto& g : rows) {
    os << g.image << ',' << cell(g.od_center ? std::optional(g.od_center->x) : std::nullopt) << ','
       << cell(g.od_center ? std::optional(g.od_center->y) : std::nullopt) << ',' << cell(g.od_radius) << ','
       << cell(g.fovea ? std::optional(g.fovea->x) : std::nullopt) << ','
       << cell(g.fovea ? std::optional(g.fovea->y) : std::nullopt) << '\n';
  }
}

inline void save_annotations(const std::string& path, const std::vector<GroundTruth>& rows) {
  std::ofstream os(path);
  if (!os) throw io_error("cannot write " + path);
  write_annotations(os, rows);
}

}  // namespace fundus::pipeline
