#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "fundus/pipeline/detect.hpp"

namespace fundus::pipeline {

struct StageTiming {
  std::string stage;
  double median_ms = 0.0;
  std::size_t samples = 0;
};

inline double median(std::vector<double> v) {
  if (v.empty()) throw invalid_input("median of an empty sample");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  if (v.size() % 2) return v[mid];
  const double upper = v[mid];
  return 0.5 * (upper + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
}

/// Runs the full detector `repeats` times and reports the median wall time of
/// every stage, in first-seen stage order.
inline std::vector<StageTiming> bench(const Raster& rgb, const PipelineConfig& cfg,
                                      const classifier::TrainedValidator& validator, int repeats,
                                      const DetectOptions& opt = {}) {
  if (repeats < 1) throw invalid_input("bench: repeats must be >= 1");
  std::vector<std::string> order;
  std::map<std::string, std::vector<double>> samples;
  for (int i = 0; i < repeats; ++i) {
    const auto report = detect(rgb, "bench", cfg, validator, opt);
    for (const auto& [stage, ms] : report.timings_ms) {
      auto& s = samples[stage];
      if (s.empty()) order.push_back(stage);
      s.push_back(ms);
    }
  }
  std::vector<StageTiming> out;
  for (const auto& stage : order) out.push_back({stage, median(samples[stage]), samples[stage].size()});
  return out;
}

}  // namespace fundus::pipeline
