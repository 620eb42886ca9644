#pragma once

#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fundus/pipeline/annotations.hpp"
#include "fundus/pipeline/train.hpp"

namespace fundus::pipeline {

/// Values tried for one parameter: "n_topics" (Z), "knn_k" (K) or
/// "vocab_size" (V). Short names Z, K and V are accepted.
struct SweepRange {
  std::string param;
  std::vector<int> values;
};

struct SweepRow {
  std::string param;
  int value = 0;
  double accuracy = 0.0;
};

inline std::string canonical_sweep_param(const std::string& p) {
  if (p == "Z" || p == "n_topics") return "n_topics";
  if (p == "K" || p == "knn_k") return "knn_k";
  if (p == "V" || p == "vocab_size") return "vocab_size";
  throw invalid_input("sweep: unknown parameter '" + p + "' (expected Z, K or V)");
}

/// Sweepable range of each parameter.
inline std::pair<int, int> sweep_limits(const std::string& canonical) {
  if (canonical == "n_topics") return {5, 40};
  if (canonical == "knn_k") return {1, 25};
  return {32, 512};
}

/// Share of crops whose verdict (summed disc membership against tau) agrees
/// with their label.
inline double crop_accuracy(const classifier::TrainedValidator& v, std::span<const TrainingCrop> crops,
                            const PipelineConfig& cfg) {
  if (crops.empty()) throw invalid_input("crop_accuracy: no crops");
  const auto params = cfg.validator_params();
  std::size_t right = 0;
  for (const auto& c : crops) {
    const auto u = classifier::window_memberships(classifier::prepare_window(c.image, c.image.bounds()), v, params);
    const bool said_od = classifier::od_score(u) >= cfg.tau;
    right += said_od == (c.label < classifier::kOdClassCount);
  }
  return static_cast<double>(right) / static_cast<double>(crops.size());
}

/// One-at-a-time sweeps: each range varies its parameter while the others
/// keep the values in `base`. Changing K reuses the trained model.
inline std::vector<SweepRow> sweep(std::span<const TrainingCrop> train, std::span<const TrainingCrop> test,
                                   const PipelineConfig& base, const std::vector<SweepRange>& ranges) {
  std::vector<SweepRow> rows;
  std::optional<classifier::TrainedValidator> base_model;
  for (const auto& r : ranges) {
    const std::string param = canonical_sweep_param(r.param);
    if (r.values.empty()) throw invalid_input("sweep: empty range for " + param);
    const auto [lo, hi] = sweep_limits(param);
    for (int value : r.values)
      if (value < lo || value > hi)
        throw invalid_input("sweep: " + param + " value " + std::to_string(value) + " outside [" + std::to_string(lo) +
                            ", " + std::to_string(hi) + "]");
    for (int value : r.values) {
      PipelineConfig cfg = base;
      cfg.set(param, std::to_string(value));
      cfg.validate();
      double acc = 0.0;
      if (param == "knn_k") {
        if (!base_model) base_model = train_validator(train, base);
        acc = crop_accuracy(*base_model, test, cfg);
      } else {
        acc = crop_accuracy(train_validator(train, cfg), test, cfg);
      }
      rows.push_back({param, value, acc});
    }
  }
  return rows;
}

inline constexpr const char* kSweepHeader = "param,value,accuracy";

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << kSweepHeader << '\n';
  std::ostringstream num;
  num.precision(17);
  for (const auto& r : rows) {
    num.str("");
    num << r.accuracy;
    os << r.param << ',' << r.value << ',' << num.str() << '\n';
  }
}

inline std::vector<SweepRow> parse_sweep_csv(std::istream& is, const std::string& source = "sweep") {
  std::string line;
  if (!std::getline(is, line) || detail::trim(line) != kSweepHeader)
    throw format_error(source + ": expected header '" + kSweepHeader + "'");
  std::vector<SweepRow> rows;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    const auto cells = detail::split_csv_line(detail::trim(line));
    if (cells.size() != 3) throw format_error(where + ": expected 3 columns");
    SweepRow r;
    r.param = canonical_sweep_param(cells[0]);
    const auto v = detail::optional_number(cells[1], where), a = detail::optional_number(cells[2], where);
    if (!v || !a || *v != std::floor(*v)) throw format_error(where + ": bad value or accuracy");
    r.value = static_cast<int>(*v);
    r.accuracy = *a;
    rows.push_back(r);
  }
  return rows;
}

/// Parses "5,15,30" or "5:40:5" (first:last:step) into integer values.
inline std::vector<int> parse_sweep_values(const std::string& text) {
  std::vector<int> out;
  if (text.find(':') != std::string::npos) {
    std::vector<int> p;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) p.push_back(detail::parse_number<int>("range", detail::trim(item)));
    if (p.size() != 3 || p[2] <= 0 || p[1] < p[0]) throw invalid_input("sweep: range must be first:last:step");
    for (int v = p[0]; v <= p[1]; v += p[2]) out.push_back(v);
  } else if (!detail::trim(text).empty()) {
    out = detail::parse_int_list("range", text);
  }
  if (out.empty()) throw invalid_input("sweep: empty range");
  return out;
}

}  // namespace fundus::pipeline
