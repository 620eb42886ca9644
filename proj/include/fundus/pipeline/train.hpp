#pragma once

#include <algorithm>
#include <array>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fundus/classifier/validation.hpp"
#include "fundus/encoding/kmeans.hpp"
#include "fundus/pipeline/config.hpp"
#include "fundus/topicmodel/plsa_io.hpp"

namespace fundus::pipeline {

/// A labelled training crop; `label` indexes classifier::kClassNames.
struct TrainingCrop {
  int label = 0;
  Raster image;
  std::string source;
};

struct TrainingStats {
  std::size_t crops = 0;
  std::size_t blocks = 0;
  std::size_t codebook_samples = 0;
  std::array<std::size_t, classifier::kClassCount> per_class{};
};

inline encoding::KMeansOptions kmeans_options(const PipelineConfig& cfg) {
  encoding::KMeansOptions o;
  o.max_iterations = cfg.kmeans_max_iterations;
  o.sigma = cfg.llc_sigma;
  o.lambda = cfg.llc_lambda;
  return o;
}

/// HOG, vocabulary, LLC histograms, pLSA and the labelled topic mixtures.
inline classifier::TrainedValidator train_validator(std::span<const TrainingCrop> crops, const PipelineConfig& cfg,
                                                    TrainingStats* stats = nullptr) {
  cfg.validate();
  if (crops.empty()) throw invalid_input("train: no training crops");
  TrainingStats st;
  st.crops = crops.size();

  std::vector<descriptors::HogDescriptor> descs;
  descs.reserve(crops.size());
  for (const auto& c : crops) {
    if (c.label < 0 || c.label >= classifier::kClassCount) throw invalid_input("train: bad label for " + c.source);
    ++st.per_class[c.label];
    descs.push_back(descriptors::hog(classifier::prepare_window(c.image, c.image.bounds())));
  }
  for (int k = 0; k < classifier::kClassCount; ++k)
    if (st.per_class[k] == 0) throw invalid_input(std::string("train: no crops for class ") + classifier::kClassNames[k]);

  std::vector<std::pair<std::size_t, std::size_t>> blocks;  // (descriptor, block)
  for (std::size_t i = 0; i < descs.size(); ++i)
    for (std::size_t b = 0; b < descs[i].block_count(); ++b) blocks.emplace_back(i, b);
  st.blocks = blocks.size();
  if (blocks.size() < static_cast<std::size_t>(cfg.vocab_size))
    throw invalid_input("train: vocab_size " + std::to_string(cfg.vocab_size) + " exceeds the " +
                        std::to_string(blocks.size()) + " HOG blocks available");

  std::vector<std::pair<std::size_t, std::size_t>> sample;
  if (blocks.size() > cfg.codebook_sample) {
    std::mt19937_64 rng(cfg.codebook_seed);
    std::sample(blocks.begin(), blocks.end(), std::back_inserter(sample), cfg.codebook_sample, rng);
  } else {
    sample = blocks;
  }
  st.codebook_samples = sample.size();
  Eigen::MatrixXd points(descriptors::kBlockDim, static_cast<Eigen::Index>(sample.size()));
  for (std::size_t j = 0; j < sample.size(); ++j) {
    const auto blk = descs[sample[j].first].block(sample[j].second);
    for (int r = 0; r < descriptors::kBlockDim; ++r) points(r, static_cast<Eigen::Index>(j)) = blk[r];
  }

  classifier::TrainedValidator v;
  v.codebook = encoding::learn_codebook(points, cfg.vocab_size, cfg.codebook_seed, kmeans_options(cfg));

  std::vector<double> counts;
  std::vector<int> labels;
  counts.reserve(descs.size() * static_cast<std::size_t>(cfg.vocab_size));
  for (std::size_t i = 0; i < descs.size(); ++i) {
    const auto bow = encoding::encode_window(descs[i], v.codebook, cfg.llc_k);
    counts.insert(counts.end(), bow.counts.begin(), bow.counts.end());
    labels.push_back(crops[i].label);
  }
  const topicmodel::Corpus corpus(descs.size(), static_cast<std::size_t>(cfg.vocab_size), std::move(counts), labels);
  v.model = topicmodel::train_plsa(corpus, static_cast<std::size_t>(cfg.n_topics), cfg.plsa_seed,
                                   {cfg.plsa_max_iterations, cfg.plsa_tolerance});

  v.neighbours.reserve(descs.size());
  for (std::size_t d = 0; d < descs.size(); ++d)
    v.neighbours.push_back({v.model.topics_of_document(d), classifier::crisp_membership(labels[d])});
  if (stats) *stats = st;
  return v;
}

inline constexpr const char* kCodebookFile = "codebook.flcb";
inline constexpr const char* kModelFile = "model.flpl";
inline constexpr const char* kNeighboursFile = "neighbours.flnb";
inline constexpr const char* kTraceFile = "trace.csv";

inline void save_artifacts(const std::filesystem::path& dir, const classifier::TrainedValidator& v) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw io_error("cannot create " + dir.string() + ": " + ec.message());
  encoding::save_codebook((dir / kCodebookFile).string(), v.codebook);
  topicmodel::save_model((dir / kModelFile).string(), v.model);
  classifier::save_neighbours((dir / kNeighboursFile).string(), v.neighbours);
  topicmodel::save_trace_csv((dir / kTraceFile).string(), v.model);
}

inline classifier::TrainedValidator load_artifacts(const std::filesystem::path& dir) {
  for (const char* f : {kCodebookFile, kModelFile, kNeighboursFile})
    if (!std::filesystem::exists(dir / f)) throw io_error("missing model file " + (dir / f).string());
  classifier::TrainedValidator v;
  v.codebook = encoding::load_codebook((dir / kCodebookFile).string());
  v.model = topicmodel::load_model((dir / kModelFile).string());
  v.neighbours = classifier::load_neighbours((dir / kNeighboursFile).string());
  if (v.codebook.size() != static_cast<int>(v.model.n_words))
    throw format_error("codebook size does not match the topic model vocabulary");
  for (const auto& n : v.neighbours)
    if (n.topic_vector.size() != v.model.n_topics) throw format_error("neighbour set does not match the topic model");
  return v;
}

}  // namespace fundus::pipeline
