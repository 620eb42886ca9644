#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fundus/pipeline/config.hpp"
#include "fundus/pipeline/detect.hpp"
#include "fundus/pipeline/synthetic.hpp"
#include "fundus/pipeline/train.hpp"
#include "fundus/saliency/contrast.hpp"
#include "fundus/saliency/segmentation.hpp"

namespace fundus::pipeline {

struct CropSetOptions {
  int images = 30;
  int per_class = 60;
  int negatives = 300;  // non-disc crops; defaults to the total of the five disc classes
  std::uint64_t seed = 2024;
  int jitter = 10;  // max centre offset of disc crops, pixels
  SynthOptions synth;
};

namespace detail {

inline Rect window_at(Point c, int kind, const PipelineConfig& cfg, const Rect& bounds) {
  return saliency::candidate_windows(c, cfg.window, bounds)[static_cast<std::size_t>(kind)];
}

inline std::string crop_name(int image, int k) {
  return "synthetic_" + std::to_string(image) + "_" + std::to_string(k);
}

}  // namespace detail

/// Labelled crops cut from rendered synthetic fundus images. Disc classes
/// use the candidate windows around a jittered disc centre; the whole class
/// alternates between the centred and the enlarged window. Negatives are
/// windows of salient non-disc regions, windows on the field border and
/// random windows away from the disc.
inline std::vector<TrainingCrop> make_training_crops(const CropSetOptions& opt, const PipelineConfig& cfg) {
  if (opt.images < 1 || opt.per_class < 1 || opt.negatives < 1) throw invalid_input("crop set needs at least one image and one crop per class");
  std::vector<TrainingCrop> out;
  std::mt19937_64 rng(opt.seed ^ 0x5DEECE66Dull);
  auto uni = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };

  auto spread = [&](int total) {
    std::vector<int> q(static_cast<std::size_t>(opt.images), total / opt.images);
    for (int i = 0; i < total % opt.images; ++i) ++q[static_cast<std::size_t>(i)];
    return q;
  };
  const std::vector<int> quota = spread(opt.per_class), neg_quota = spread(opt.negatives);

  for (int i = 0; i < opt.images; ++i) {
    const SyntheticScene scene = make_scene(opt.seed, i + 1, opt.synth);
    const Raster img = quantize8(render_scene(scene, opt.synth));
    const Rect bounds = img.bounds();
    const double D = scene.od_diameter;
    const int n = quota[static_cast<std::size_t>(i)];
    int serial = 0;
    auto push = [&](int label, const Rect& r) {
      if (r.empty()) return;
      out.push_back({label, imaging::crop(img, r), detail::crop_name(i, serial++)});
    };

    for (int k = 0; k < n; ++k) {
      const Point c{scene.od_center.x + uni(-opt.jitter, opt.jitter), scene.od_center.y + uni(-opt.jitter, opt.jitter)};
      push(0, detail::window_at(c, k % 2 == 0 ? 0 : 5, cfg, bounds));
      for (int part = 1; part <= 4; ++part) push(part, detail::window_at(c, part, cfg, bounds));
    }

    // Hard negatives: usable windows of the salient non-disc regions that
    // detection would examine.
    std::vector<Rect> hard;
    const auto lab = imaging::rgb_to_lab(img);
    const auto smap = saliency::multiscale_saliency(lab, cfg.saliency_scales(img.width()));
    const auto mask = saliency::segment_interest(smap, cfg.interest_patch);
    const imaging::Mask field = cfg.field_filter ? eroded_field(imaging::to_grayscale(img), cfg) : imaging::Mask();
    for (const auto& c : rank_candidates(smap, mask, cfg, cfg.field_filter ? &field : nullptr)) {
      if (imaging::distance(c.anchor, scene.od_center) < D) continue;
      const auto& region = c.region;
      for (std::size_t k = 0; k < region.windows.size(); ++k)
        if (classifier::usable_window(region.windows[k], region.nominal_windows[k], cfg.min_window_fraction))
          hard.push_back(region.windows[k]);
    }
    std::shuffle(hard.begin(), hard.end(), rng);
    const int n_neg = neg_quota[static_cast<std::size_t>(i)];
    const int n_hard = std::min<int>(static_cast<int>(hard.size()), n_neg / 2);
    for (int k = 0; k < n_hard; ++k) push(5, hard[static_cast<std::size_t>(k)]);

    // Field-border windows: the curved edge of the field mimics a disc rim.
    const double clearance = D / 2.0 + std::hypot(cfg.window.width, cfg.window.height) / 2.0;
    const int n_border = (n_neg - n_hard) / 2;
    for (int k = 0, attempts = 0; k < n_border && attempts < 10000; ++attempts) {
      const double th = uni(0.0, 2.0 * std::numbers::pi);
      const double rr = scene.field_radius + uni(-0.5, 0.2) * cfg.window.width;
      const Point c{scene.field_center.x + rr * std::cos(th), scene.field_center.y + rr * std::sin(th)};
      if (imaging::distance(c, scene.od_center) < clearance) continue;
      const Rect r = detail::window_at(c, 0, cfg, bounds);
      if (!classifier::usable_window(r, saliency::nominal_windows(c, cfg.window)[0], cfg.min_window_fraction)) continue;
      push(5, r);
      ++k;
    }

    for (int k = n_hard + n_border, attempts = 0; k < n_neg && attempts < 10000; ++attempts) {
      const double rr = scene.field_radius * std::sqrt(uni(0.0, 1.0));
      const double th = uni(0.0, 2.0 * std::numbers::pi);
      const Point c{scene.field_center.x + rr * std::cos(th), scene.field_center.y + rr * std::sin(th)};
      if (imaging::distance(c, scene.od_center) < clearance) continue;
      const Rect r = detail::window_at(c, 0, cfg, bounds);
      if (!classifier::usable_window(r, saliency::nominal_windows(c, cfg.window)[0], cfg.min_window_fraction)) continue;
      push(5, r);
      ++k;
    }
  }
  return out;
}

}  // namespace fundus::pipeline
