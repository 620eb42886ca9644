// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only when
// every pass/fail criterion holds.

#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "fundus/fundus.hpp"
#include "support/oracles.hpp"

using namespace fundus;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// 1. Lab conversion against the scalar oracle.
Outcome color_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double r = u(rng), g = u(rng), b = u(rng);
    const auto got = imaging::rgb_to_lab(r, g, b);
    const auto want = oracle::lab(r, g, b);
    worst = std::max({worst, std::abs(got.L - want.L), std::abs(got.a - want.a), std::abs(got.b - want.b)});
  }
  const auto w = imaging::rgb_to_lab(1, 1, 1), k = imaging::rgb_to_lab(0, 0, 0);
  const double ends = std::max({std::abs(w.L - 100), std::abs(w.a), std::abs(w.b), std::abs(k.L), std::abs(k.a), std::abs(k.b)});
  const double t = seconds_since(t0);
  return {worst <= 1e-6 && ends <= 1e-6 && t < 1.0,
          fmt("max deviation %.2e, white/black deviation %.2e, %.3f s", worst, ends, t)};
}

// 2. Integral-image saliency against the double loop.
Outcome saliency_oracle() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int img = 0; img < 50; ++img) {
    std::mt19937_64 rng(100 + img);
    imaging::LabRaster lab(128, 128);
    std::uniform_real_distribution<double> L(0, 100), ab(-80, 80);
    for (double& v : lab.L()) v = L(rng);
    for (double& v : lab.a()) v = ab(rng);
    for (double& v : lab.b()) v = ab(rng);
    const auto got = saliency::multiscale_saliency(lab);
    oracle::Planes p{128, 128, {}};
    for (int c = 0; c < 3; ++c) p.c[c].assign(lab.plane(c).begin(), lab.plane(c).end());
    const auto want = oracle::saliency(p, got.scales_used);
    for (std::size_t i = 0; i < want.size(); ++i) worst = std::max(worst, std::abs(got.values.data()[i] - want[i]));
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-6 && t < 30.0, fmt("50 images, max deviation %.2e, %.2f s", worst, t)};
}

// 3. pLSA EM monotonicity, normalisation and the fixed-instance oracle.
Outcome plsa_em() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(3);
  double worst_drop = 0.0, worst_norm = 0.0;
  topicmodel::PlsaOptions opt;
  opt.max_iterations = 100;
  opt.tolerance = -1.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t D = std::uniform_int_distribution<std::size_t>(1, 10)(rng);
    const std::size_t W = std::uniform_int_distribution<std::size_t>(1, 20)(rng);
    const std::size_t Z = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
    std::vector<double> n(D * W);
    for (std::size_t d = 0; d < D; ++d) {
      for (std::size_t w = 0; w < W; ++w) n[d * W + w] = std::uniform_int_distribution<int>(0, 5)(rng);
      n[d * W + std::uniform_int_distribution<std::size_t>(0, W - 1)(rng)] += 1;
    }
    const auto m = topicmodel::train_plsa(topicmodel::Corpus(D, W, n), Z, trial, opt);
    for (std::size_t i = 1; i < m.log_likelihood_trace.size(); ++i)
      worst_drop = std::max(worst_drop, m.log_likelihood_trace[i - 1] - m.log_likelihood_trace[i]);
    worst_norm = std::max(worst_norm, std::abs(std::accumulate(m.p_z.begin(), m.p_z.end(), 0.0) - 1.0));
    for (std::size_t z = 0; z < Z; ++z) {
      double sw = 0, sd = 0;
      for (std::size_t w = 0; w < W; ++w) sw += m.pw(z, w);
      for (std::size_t d = 0; d < D; ++d) sd += m.pd(z, d);
      worst_norm = std::max({worst_norm, std::abs(sw - 1.0), std::abs(sd - 1.0)});
    }
  }

  const std::vector<std::vector<double>> counts = {{4, 1, 0}, {1, 2, 5}};
  std::vector<std::vector<std::vector<double>>> resp(2, std::vector<std::vector<double>>(3));
  std::vector<double> flat_resp;
  for (int d = 0; d < 2; ++d)
    for (int w = 0; w < 3; ++w) {
      const double a = 0.2 + 0.15 * d + 0.1 * w;
      resp[d][w] = {a, 1.0 - a};
      flat_resp.insert(flat_resp.end(), {a, 1.0 - a});
    }
  opt.max_iterations = 25;
  const auto want = oracle::plsa_em(counts, resp, 25);
  const auto got = topicmodel::train_plsa_from(topicmodel::Corpus(2, 3, {4, 1, 0, 1, 2, 5}), 2, flat_resp, opt);
  const double gap = std::abs(got.log_likelihood_trace.back() - want.trace.back());
  const double t = seconds_since(t0);
  return {worst_drop <= 1e-9 && worst_norm <= 1e-9 && gap <= 1e-9 && t < 60.0,
          fmt("largest decrease %.2e, normalisation error %.2e, oracle gap %.2e, %.2f s", worst_drop, worst_norm, gap, t)};
}

// 4. LLC sum-to-one, reconstruction against uniform weights, one-hot bases.
Outcome llc() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0, 1);
  Eigen::MatrixXd bases(descriptors::kBlockDim, 113);
  for (Eigen::Index i = 0; i < bases.size(); ++i) bases.data()[i] = g(rng);
  const encoding::Codebook cb(bases);
  const int k = encoding::kDefaultLlcNeighbours;
  double worst_sum = 0.0;
  int worse_than_uniform = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> x(descriptors::kBlockDim);
    for (double& v : x) v = g(rng);
    const auto code = encoding::llc_encode(x, cb, k);
    worst_sum = std::max(worst_sum, std::abs(std::accumulate(code.coefficients.begin(), code.coefficients.end(), 0.0) - 1.0));
    std::vector<std::pair<double, int>> d;
    for (int j = 0; j < cb.size(); ++j) {
      double s = 0;
      for (int i = 0; i < cb.dim(); ++i) s += (x[i] - bases(i, j)) * (x[i] - bases(i, j));
      d.push_back({s, j});
    }
    std::sort(d.begin(), d.end());
    std::vector<double> uniform(cb.size(), 0.0);
    for (int i = 0; i < k; ++i) uniform[d[i].second] = 1.0 / k;
    worse_than_uniform += encoding::reconstruction_error(x, cb, code.coefficients) >
                          encoding::reconstruction_error(x, cb, uniform) * (1 + 1e-12);
  }
  double worst_onehot = 0.0;
  for (int j = 0; j < cb.size(); ++j) {
    std::vector<double> x(bases.col(j).data(), bases.col(j).data() + cb.dim());
    const auto code = encoding::llc_encode(x, cb, k);
    for (int i = 0; i < cb.size(); ++i) worst_onehot = std::max(worst_onehot, std::abs(code.coefficients[i] - (i == j)));
  }
  const double t = seconds_since(t0);
  return {worst_sum <= 1e-9 && worse_than_uniform == 0 && worst_onehot <= 1e-9 && t < 10.0,
          fmt("sum error %.2e, %d of 1000 worse than uniform, one-hot error %.2e, %.2f s", worst_sum, worse_than_uniform,
              worst_onehot, t)};
}

// 5. Fuzzy k-NN worked example and simplex invariants.
Outcome fuzzy_knn() {
  using classifier::LabeledTopicPoint;
  const std::vector<LabeledTopicPoint> ex = {{{1.0}, {1, 0}}, {{2.0}, {0, 1}}, {{-2.0}, {0, 1}}};
  const auto u = classifier::fuzzy_knn(std::vector<double>{0.0}, ex, 3, 2.0);
  const double ex_err = std::max(std::abs(u[0] - 2.0 / 3.0), std::abs(u[1] - 1.0 / 3.0));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0, 1);
  std::vector<LabeledTopicPoint> train;
  for (int i = 0; i < 120; ++i) {
    std::vector<double> t(15);
    for (double& v : t) v = unit(rng);
    train.push_back({t, classifier::crisp_membership(i % classifier::kClassCount)});
  }
  int violations = 0;
  for (int q = 0; q < 1000; ++q) {
    std::vector<double> x(15);
    for (double& v : x) v = unit(rng);
    const auto m = classifier::fuzzy_knn(x, train, 9, 2.0);
    double s = 0;
    for (double v : m) {
      violations += v < 0.0 || v > 1.0 + 1e-12;
      s += v;
    }
    violations += std::abs(s - 1.0) > 1e-12;
  }
  return {ex_err <= 1e-12 && violations == 0, fmt("worked example error %.2e, %d simplex violations", ex_err, violations)};
}

// 6. Parabola recovery.
Outcome parabola() {
  const auto t0 = Clock::now();
  auto points = [](imaging::Point v, double p, double phi, int n, double noise, std::mt19937_64& rng) {
    std::vector<imaging::Point> out;
    std::normal_distribution<double> g(0, 1);
    const double c = std::cos(phi), s = std::sin(phi);
    for (int i = 0; i < n; ++i) {
      const double xr = -250.0 + 500.0 * i / (n - 1), yr = xr * xr / (4 * p);
      out.push_back({v.x + xr * c - yr * s + noise * g(rng), v.y + xr * s + yr * c + noise * g(rng)});
    }
    return out;
  };
  auto gap = [](double a, double b) {
    const double d = std::fmod(std::abs(a - b), 2 * std::numbers::pi);
    return std::min(d, 2 * std::numbers::pi - d);
  };
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> P(20, 150), Phi(0, 2 * std::numbers::pi), V(100, 1400);
  double worst_p = 0, worst_phi = 0;
  for (int i = 0; i < 50; ++i) {
    const double p = P(rng), phi = Phi(rng);
    const imaging::Point v{V(rng), V(rng)};
    const auto fit = vasculature::fit_parabola(points(v, p, phi, 100, 0.0, rng), v);
    worst_p = std::max(worst_p, std::abs(fit.p - p) / p);
    worst_phi = std::max(worst_phi, gap(fit.phi, phi));
  }
  int good = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 r(1000 + seed);
    const double p = P(r), phi = Phi(r);
    const auto fit = vasculature::fit_parabola(points({700, 500}, p, phi, 200, 1.0, r), {700, 500});
    good += std::abs(fit.p - p) / p <= 0.05;
  }
  const double t = seconds_since(t0);
  return {worst_p <= 1e-6 && worst_phi <= 1e-4 && good >= 19 && t < 60.0,
          fmt("noiseless max |dp|/p %.2e, max |dphi| %.2e rad; noisy %d/20 within 5%%; %.2f s", worst_p, worst_phi, good, t)};
}

// 7. Distance transform against exhaustive search.
Outcome distance_transform() {
  std::mt19937_64 rng(7);
  int mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int w = std::uniform_int_distribution<int>(1, 64)(rng), h = std::uniform_int_distribution<int>(1, 64)(rng);
    const double density = std::uniform_real_distribution<double>(0.2, 0.995)(rng);
    imaging::Mask m(w, h);
    std::vector<bool> fg(static_cast<std::size_t>(w) * h);
    for (int i = 0; i < w * h; ++i) {
      fg[i] = std::bernoulli_distribution(density)(rng);
      m.set(i % w, i / w, fg[i]);
    }
    const auto got = vasculature::distance_transform(m);
    const auto want = oracle::distance_transform(fg, w, h);
    for (int i = 0; i < w * h; ++i) mismatches += got.data()[i] != want[i];
  }
  return {mismatches == 0, fmt("200 maps, %d mismatching pixels", mismatches)};
}

struct HeldOut {
  pipeline::SyntheticScene scene;
  imaging::Raster image;
};

constexpr std::uint64_t kHeldOutSeed = 4711;

// 8. Train on the bundled crop set, detect on 20 held-out images.
Outcome end_to_end(const pipeline::PipelineConfig& cfg, classifier::TrainedValidator& validator,
                   std::vector<HeldOut>& held_out) {
  const auto t0 = Clock::now();
  const auto crops = pipeline::make_training_crops(pipeline::CropSetOptions{}, cfg);
  validator = pipeline::train_validator(crops, cfg);
  const double t_train = seconds_since(t0);

  int od_ok = 0, fovea_ok = 0;
  double worst_fovea = 0.0;
  std::string misses;
  for (int i = 0; i < 20; ++i) {
    HeldOut h{pipeline::make_scene(kHeldOutSeed, i), {}};
    h.image = pipeline::quantize8(pipeline::render_scene(h.scene));
    const auto r = pipeline::detect(h.image, "held_out_" + std::to_string(i), cfg, validator);
    const double D = h.scene.od_diameter;
    const bool od = r.od.found && imaging::distance(r.od.center, h.scene.od_center) <= D / 2.0;
    const double fe = r.fovea.found ? imaging::distance(r.fovea.position, h.scene.fovea) : INFINITY;
    od_ok += od;
    fovea_ok += fe <= 0.5 * D;
    worst_fovea = std::max(worst_fovea, fe / D);
    if (!od || fe > 0.5 * D) misses += " " + std::to_string(i);
    held_out.push_back(std::move(h));
  }
  const double t = seconds_since(t0);
  return {od_ok == 20 && fovea_ok >= 19 && t < 300.0,
          fmt("OD %d/20, fovea within 0.5 D %d/20 (worst %.3f D), training %.1f s, total %.1f s%s%s", od_ok, fovea_ok,
              worst_fovea, t_train, t, misses.empty() ? "" : "; misses:", misses.c_str())};
}

// 9. Gain/bias perturbations and HOG stability.
Outcome invariance(const pipeline::PipelineConfig& cfg, const classifier::TrainedValidator& validator,
                   const std::vector<HeldOut>& held_out) {
  const auto t0 = Clock::now();
  pipeline::DetectOptions od_only;
  od_only.optic_disc_only = true;
  int stable = 0, total = 0;
  double worst = 0.0;
  const std::size_t n_images = std::min<std::size_t>(5, held_out.size());
  for (std::size_t i = 0; i < n_images; ++i) {
    const auto& h = held_out[i];
    const auto base = pipeline::detect(h.image, "base", cfg, validator, od_only);
    for (double gain : {0.8, 1.2})
      for (double bias : {-0.08, 0.0, 0.08}) {
        const auto r = pipeline::detect(imaging::adjust_gain_bias(h.image, gain, bias), "perturbed", cfg, validator, od_only);
        ++total;
        if (!base.od.found || !r.od.found) continue;
        const double d = imaging::distance(r.od.center, base.od.center) / h.scene.od_diameter;
        worst = std::max(worst, d);
        stable += d <= 0.5;
      }
  }

  double hog_gap = 0.0;
  for (std::size_t i = 0; i < n_images; ++i) {
    const auto& s = held_out[i].scene;
    const imaging::Rect win{static_cast<int>(s.od_center.x) - 56, static_cast<int>(s.od_center.y) - 61, 112, 122};
    const auto w = classifier::prepare_window(held_out[i].image, win);
    auto t = w;
    for (double& v : t.data()) v = 2.0 * v + 0.1;
    const auto a = descriptors::hog(w).values, b = descriptors::hog(t).values;
    for (std::size_t k = 0; k < a.size(); ++k) hog_gap = std::max(hog_gap, std::abs(a[k] - b[k]));
  }
  const double t = seconds_since(t0);
  return {stable == total && total > 0 && hog_gap <= 1e-6,
          fmt("%d/%d perturbed detections within D/2 (worst %.3f D), HOG max change %.2e, %.1f s", stable, total, worst,
              hog_gap, t)};
}

// 10. Timing, informational.
Outcome timing(const pipeline::PipelineConfig& cfg, const classifier::TrainedValidator& validator,
               const std::vector<HeldOut>& held_out) {
  if (held_out.empty()) return {false, "no image to time"};
  const auto rows = pipeline::bench(held_out.front().image, cfg, validator, 3);
  double sal = 0, val = 0, total = 0;
  for (const auto& r : rows) {
    if (r.stage == "saliency") sal = r.median_ms / 1000;
    if (r.stage == "validation") val = r.median_ms / 1000;
    if (r.stage == "total") total = r.median_ms / 1000;
  }
  return {true, fmt("informational: saliency %.2f s (bound 5 s, reference 1.1 s), validation %.2f s, full pipeline "
                    "%.2f s (bound 30 s, reference ~10.1 s) on 1500x1152",
                    sal, val, total)};
}

}  // namespace

int main() {
  const pipeline::PipelineConfig cfg;
  classifier::TrainedValidator validator;
  std::vector<HeldOut> held_out;

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"colour conversion matches the scalar oracle", color_oracle},
      {"saliency matches the brute-force oracle", saliency_oracle},
      {"pLSA EM is monotone, normalised and matches the oracle", plsa_em},
      {"LLC codes are affine, optimal and one-hot on bases", llc},
      {"fuzzy k-NN worked example and simplex", fuzzy_knn},
      {"parabola fit recovers p and phi", parabola},
      {"distance transform is exact", distance_transform},
      {"end-to-end synthetic detection", [&] { return end_to_end(cfg, validator, held_out); }},
      {"gain/bias invariance", [&] { return invariance(cfg, validator, held_out); }},
      {"timing", [&] { return timing(cfg, validator, held_out); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s  %2zu  %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%s: %zu of %zu criteria passed\n", failed ? "FAILED" : "OK", criteria.size() - failed, criteria.size());
  return failed ? 1 : 0;
}
