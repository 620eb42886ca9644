#pragma once

#include <numeric>
#include <span>
#include <vector>

#include "fundus/classifier/fuzzy_knn.hpp"
#include "fundus/descriptors/hog.hpp"
#include "fundus/encoding/llc.hpp"
#include "fundus/imaging/color.hpp"
#include "fundus/imaging/resize.hpp"
#include "fundus/saliency/segmentation.hpp"
#include "fundus/topicmodel/plsa.hpp"

namespace fundus::classifier {

using imaging::Raster;
using imaging::Rect;

struct ValidatorParams {
  int knn_k = 9;
  double fuzzy_m = 2.0;
  double tau = 0.5;
  int llc_k = encoding::kDefaultLlcNeighbours;
  std::size_t fold_in_iterations = 200;
  double min_window_fraction = 0.5;
};

/// Everything training produces: vocabulary, topic model and labelled
/// training mixtures.
struct TrainedValidator {
  encoding::Codebook codebook;
  topicmodel::PlsaModel model;
  std::vector<LabeledTopicPoint> neighbours;
};

/// Grayscale crop of `window`, resampled to the HOG window size.
inline Raster prepare_window(const Raster& image, const Rect& window) {
  Raster crop = imaging::crop(image, window);
  if (crop.channels() == 3) crop = imaging::to_grayscale(crop);
  return imaging::resize_bilinear(crop, descriptors::kWindowCols, descriptors::kWindowRows);
}

inline encoding::BowHistogram window_histogram(const Raster& gray_window, const encoding::Codebook& cb, int llc_k) {
  return encoding::encode_window(descriptors::hog(gray_window), cb, llc_k);
}

/// Class memberships of a prepared (grayscale, HOG-sized) window.
inline std::vector<double> window_memberships(const Raster& gray_window, const TrainedValidator& v,
                                              const ValidatorParams& p) {
  const auto bow = window_histogram(gray_window, v.codebook, p.llc_k);
  const auto topics = topicmodel::fold_in(bow.counts, v.model, p.fold_in_iterations);
  return fuzzy_knn(topics.topics, v.neighbours, p.knn_k, p.fuzzy_m);
}

inline double od_score(std::span<const double> memberships) {
  return std::accumulate(memberships.begin(), memberships.begin() + kOdClassCount, 0.0);
}

struct ValidationVerdict {
  bool is_optic_disc = false;
  Rect best_window;
  int best_window_index = -1;
  std::vector<double> class_memberships;
  double aggregate_od_score = 0.0;
  std::vector<double> window_scores;  // per window, region order
};

/// A clipped window is usable when it keeps at least `fraction` of the
/// nominal width and height; heavily clipped crops would be stretched out of
/// shape by the resize.
inline bool usable_window(const Rect& clipped, const Rect& nominal, double fraction) {
  return !clipped.empty() && clipped.width >= fraction * nominal.width && clipped.height >= fraction * nominal.height;
}

/// Scores every usable window of the region and accepts it when the best
/// summed OD-class membership reaches tau. Ties keep the earliest window.
inline ValidationVerdict validate_candidate(const saliency::CandidateRegion& region, const Raster& image,
                                            const TrainedValidator& v, const ValidatorParams& p = {}) {
  ValidationVerdict out;
  for (std::size_t i = 0; i < region.windows.size(); ++i) {
    const Rect& w = region.windows[i];
    const Rect& nominal = i < region.nominal_windows.size() ? region.nominal_windows[i] : w;
    if (!usable_window(imaging::intersect(w, image.bounds()), nominal, p.min_window_fraction)) {
      out.window_scores.push_back(0.0);
      continue;
    }
    auto u = window_memberships(prepare_window(image, w), v, p);
    const double score = od_score(u);
    out.window_scores.push_back(score);
    if (out.best_window_index < 0 || score > out.aggregate_od_score) {
      out.best_window_index = static_cast<int>(i);
      out.best_window = w;
      out.aggregate_od_score = score;
      out.class_memberships = std::move(u);
    }
  }
  out.is_optic_disc = out.best_window_index >= 0 && out.aggregate_od_score >= p.tau;
  return out;
}

}  // namespace fundus::classifier
