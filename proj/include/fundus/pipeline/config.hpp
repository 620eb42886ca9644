#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fundus/classifier/validation.hpp"
#include "fundus/saliency/segmentation.hpp"
#include "fundus/vasculature/macula.hpp"
#include "fundus/vasculature/vessels.hpp"

namespace fundus::pipeline {

/// Every tunable of the pipeline. Defaults reproduce the reference setup:
/// 113 words, 15 topics, K = 9, 112×122 windows.
struct PipelineConfig {
  // saliency
  std::vector<int> scale_divisors{8, 4, 2};  // outer patch = columns / divisor
  int interest_patch = 0;                    // 0: min(width, height) / 8
  int max_candidates = 25;
  saliency::WindowGeometry window;
  double min_window_fraction = 0.5;  // clipped windows narrower or shorter than this share are skipped
  bool refine_disc = true;           // anchor candidate windows on the saliency plateau around each peak
  bool field_filter = true;          // drop candidates peaking outside the eroded field of view
  double field_margin = 0.03;        // erosion of the field of view, fraction of image width

  // vocabulary and topics
  int vocab_size = 113;
  int llc_k = encoding::kDefaultLlcNeighbours;
  double llc_sigma = 1.0;
  double llc_lambda = 1e-4;
  int kmeans_max_iterations = 100;
  std::size_t codebook_sample = 20000;
  std::uint64_t codebook_seed = 1;
  int n_topics = 15;
  std::size_t plsa_max_iterations = 500;
  double plsa_tolerance = 1e-6;
  std::uint64_t plsa_seed = 7;
  std::size_t fold_in_iterations = 200;

  // classifier
  int knn_k = 9;
  double fuzzy_m = 2.0;
  double tau = 0.5;

  // vasculature
  vasculature::SegmenterParams segmenter;
  double retention_q = 0.35;
  bool disc_connected_vessels = true;  // fit only vessels whose component reaches the disc
  double od_diameter_min = 0.06;  // fraction of image width
  double od_diameter_max = 0.25;
  double macula_threshold = vasculature::kDefaultMaculaThreshold;

  // paths (empty: not used)
  std::string template_path;

  classifier::ValidatorParams validator_params() const {
    return {knn_k, fuzzy_m, tau, llc_k, fold_in_iterations, min_window_fraction};
  }

  std::vector<int> saliency_scales(int columns) const {
    std::vector<int> out;
    const auto [lo, hi] = saliency::outer_size_bounds(columns);
    for (int d : scale_divisors) out.push_back(std::clamp(columns / d, lo, hi));
    return out;
  }

  void validate() const;
  void set(const std::string& key, const std::string& value);
  std::string to_text() const;
};

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const char* first = text.data();
  const char* last = first + text.size();
  const auto r = std::from_chars(first, last, v);
  if (r.ec != std::errc() || r.ptr != last) throw invalid_input("config: bad value for " + key + ": '" + text + "'");
  return v;
}

inline std::vector<int> parse_int_list(const std::string& key, const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<int>(key, trim(item)));
  if (out.empty()) throw invalid_input("config: empty list for " + key);
  return out;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "1" || text == "true") return true;
  if (text == "0" || text == "false") return false;
  throw invalid_input("config: bad value for " + key + ": '" + text + "'");
}

struct Field {
  std::function<void(PipelineConfig&, const std::string&)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

template <class T>
Field number_field(T PipelineConfig::*member) {
  return {[member](PipelineConfig& c, const std::string& v) { c.*member = parse_number<T>("value", v); },
          [member](const PipelineConfig& c) {
            std::ostringstream os;
            os.precision(17);
            os << c.*member;
            return os.str();
          }};
}

template <class T, class S>
Field nested_field(S PipelineConfig::*outer, T S::*inner) {
  return {[outer, inner](PipelineConfig& c, const std::string& v) { (c.*outer).*inner = parse_number<T>("value", v); },
          [outer, inner](const PipelineConfig& c) {
            std::ostringstream os;
            os.precision(17);
            os << (c.*outer).*inner;
            return os.str();
          }};
}

inline const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = {
      {"scales", {[](PipelineConfig& c, const std::string& v) { c.scale_divisors = parse_int_list("scales", v); },
                  [](const PipelineConfig& c) { return join(c.scale_divisors); }}},
      {"interest_patch", number_field(&PipelineConfig::interest_patch)},
      {"max_candidates", number_field(&PipelineConfig::max_candidates)},
      {"window_width", nested_field(&PipelineConfig::window, &saliency::WindowGeometry::width)},
      {"window_height", nested_field(&PipelineConfig::window, &saliency::WindowGeometry::height)},
      {"window_scale", nested_field(&PipelineConfig::window, &saliency::WindowGeometry::scale)},
      {"min_window_fraction", number_field(&PipelineConfig::min_window_fraction)},
      {"refine_disc", {[](PipelineConfig& c, const std::string& v) { c.refine_disc = parse_bool("refine_disc", v); },
                       [](const PipelineConfig& c) { return std::string(c.refine_disc ? "true" : "false"); }}},
      {"field_filter", {[](PipelineConfig& c, const std::string& v) { c.field_filter = parse_bool("field_filter", v); },
                        [](const PipelineConfig& c) { return std::string(c.field_filter ? "true" : "false"); }}},
      {"field_margin", number_field(&PipelineConfig::field_margin)},
      {"vocab_size", number_field(&PipelineConfig::vocab_size)},
      {"llc_k", number_field(&PipelineConfig::llc_k)},
      {"llc_sigma", number_field(&PipelineConfig::llc_sigma)},
      {"llc_lambda", number_field(&PipelineConfig::llc_lambda)},
      {"kmeans_max_iterations", number_field(&PipelineConfig::kmeans_max_iterations)},
      {"codebook_sample", number_field(&PipelineConfig::codebook_sample)},
      {"codebook_seed", number_field(&PipelineConfig::codebook_seed)},
      {"n_topics", number_field(&PipelineConfig::n_topics)},
      {"plsa_max_iterations", number_field(&PipelineConfig::plsa_max_iterations)},
      {"plsa_tolerance", number_field(&PipelineConfig::plsa_tolerance)},
      {"plsa_seed", number_field(&PipelineConfig::plsa_seed)},
      {"fold_in_iterations", number_field(&PipelineConfig::fold_in_iterations)},
      {"knn_k", number_field(&PipelineConfig::knn_k)},
      {"fuzzy_m", number_field(&PipelineConfig::fuzzy_m)},
      {"tau", number_field(&PipelineConfig::tau)},
      {"vessel_orientations", nested_field(&PipelineConfig::segmenter, &vasculature::SegmenterParams::orientations)},
      {"vessel_line_length", nested_field(&PipelineConfig::segmenter, &vasculature::SegmenterParams::line_length)},
      {"vessel_percentile", nested_field(&PipelineConfig::segmenter, &vasculature::SegmenterParams::percentile)},
      {"vessel_min_component", nested_field(&PipelineConfig::segmenter, &vasculature::SegmenterParams::min_component)},
      {"retention_q", number_field(&PipelineConfig::retention_q)},
      {"disc_connected_vessels",
       {[](PipelineConfig& c, const std::string& v) { c.disc_connected_vessels = parse_bool("disc_connected_vessels", v); },
        [](const PipelineConfig& c) { return std::string(c.disc_connected_vessels ? "true" : "false"); }}},
      {"od_diameter_min", number_field(&PipelineConfig::od_diameter_min)},
      {"od_diameter_max", number_field(&PipelineConfig::od_diameter_max)},
      {"macula_threshold", number_field(&PipelineConfig::macula_threshold)},
      {"template_path", {[](PipelineConfig& c, const std::string& v) { c.template_path = v; },
                         [](const PipelineConfig& c) { return c.template_path; }}},
  };
  return table;
}

inline void require(bool ok, const std::string& what) {
  if (!ok) throw invalid_input("config: " + what);
}

}  // namespace detail

inline void PipelineConfig::set(const std::string& key, const std::string& value) {
  const auto& f = detail::fields();
  const auto it = f.find(key);
  if (it == f.end()) throw invalid_input("config: unknown key '" + key + "'");
  try {
    it->second.set(*this, detail::trim(value));
  } catch (const Error&) {
    throw invalid_input("config: bad value for " + key + ": '" + value + "'");
  }
}

inline std::string PipelineConfig::to_text() const {
  std::ostringstream os;
  for (const auto& [k, f] : detail::fields()) os << k << '=' << f.get(*this) << '\n';
  return os.str();
}

inline void PipelineConfig::validate() const {
  using detail::require;
  require(!scale_divisors.empty(), "scales must not be empty");
  for (int d : scale_divisors) require(d >= 2 && d <= 8, "scale divisors must lie in [2, 8]");
  require(interest_patch >= 0, "interest_patch must be >= 0");
  require(max_candidates >= 1, "max_candidates must be >= 1");
  require(window.width >= 8 && window.height >= 8, "window dimensions must be >= 8");
  require(window.scale >= 1.0 && window.scale <= 4.0, "window_scale must lie in [1, 4]");
  require(min_window_fraction >= 0.0 && min_window_fraction <= 1.0, "min_window_fraction must lie in [0, 1]");
  require(field_margin >= 0.0 && field_margin < 0.5, "field_margin must lie in [0, 0.5)");
  require(vocab_size >= 16 && vocab_size <= 4096, "vocab_size must lie in [16, 4096]");
  require(llc_k >= 1 && llc_k <= vocab_size, "llc_k must lie in [1, vocab_size]");
  require(llc_sigma > 0.0 && llc_lambda >= 0.0, "llc_sigma must be > 0 and llc_lambda >= 0");
  require(kmeans_max_iterations >= 1, "kmeans_max_iterations must be >= 1");
  require(codebook_sample >= static_cast<std::size_t>(vocab_size), "codebook_sample must be >= vocab_size");
  require(n_topics >= 1 && n_topics <= 1024, "n_topics must lie in [1, 1024]");
  require(plsa_max_iterations >= 1, "plsa_max_iterations must be >= 1");
  require(plsa_tolerance >= 0.0, "plsa_tolerance must be >= 0");
  require(fold_in_iterations >= 1, "fold_in_iterations must be >= 1");
  require(knn_k >= 1, "knn_k must be >= 1");
  require(fuzzy_m > 1.0, "fuzzy_m must exceed 1");
  require(tau >= 0.0 && tau <= 1.0, "tau must lie in [0, 1]");
  require(segmenter.orientations >= 1 && segmenter.line_length >= 3, "vessel segmenter parameters out of range");
  require(segmenter.percentile > 0.0 && segmenter.percentile < 1.0, "vessel_percentile must lie in (0, 1)");
  require(retention_q > 0.0 && retention_q <= 1.0, "retention_q must lie in (0, 1]");
  require(od_diameter_min > 0.0 && od_diameter_min <= od_diameter_max && od_diameter_max <= 1.0,
          "od diameter bounds must satisfy 0 < min <= max <= 1");
  require(macula_threshold >= 0.0, "macula_threshold must be >= 0");
}

/// Reads `key = value` lines; '#' starts a comment. Unknown keys are errors.
inline void apply_config_text(PipelineConfig& cfg, std::istream& is, const std::string& source = "config") {
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw invalid_input(source + ":" + std::to_string(lineno) + ": expected key=value");
    cfg.set(detail::trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

inline PipelineConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw io_error("cannot open config " + path);
  PipelineConfig cfg;
  apply_config_text(cfg, is, path);
  cfg.validate();
  return cfg;
}

}  // namespace fundus::pipeline
