#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fundus/classifier/fuzzy_knn.hpp"
#include "fundus/pipeline/evaluate.hpp"
#include "fundus/pipeline/image_io.hpp"
#include "fundus/pipeline/train.hpp"

namespace fundus::pipeline {

/// Reads `dir/<class-name>/*` for the six class names. A missing or empty
/// class directory is an error that names the class.
inline std::vector<TrainingCrop> load_crop_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw io_error("crop directory not found: " + dir.string());
  std::vector<TrainingCrop> out;
  for (int k = 0; k < classifier::kClassCount; ++k) {
    const auto sub = dir / classifier::kClassNames[k];
    if (!std::filesystem::is_directory(sub))
      throw invalid_input(std::string("missing class directory '") + classifier::kClassNames[k] + "' in " + dir.string());
    const auto files = list_images(sub);
    if (files.empty())
      throw invalid_input(std::string("class directory '") + classifier::kClassNames[k] + "' holds no images");
    for (const auto& f : files) out.push_back({k, read_rgb(f.string()), f.string()});
  }
  return out;
}

/// Writes crops as PNG under `dir/<class-name>/`, numbered per class.
inline void save_crop_directory(const std::filesystem::path& dir, const std::vector<TrainingCrop>& crops) {
  std::vector<int> serial(classifier::kClassCount, 0);
  for (int k = 0; k < classifier::kClassCount; ++k) {
    std::error_code ec;
    std::filesystem::create_directories(dir / classifier::kClassNames[k], ec);
    if (ec) throw io_error("cannot create " + (dir / classifier::kClassNames[k]).string() + ": " + ec.message());
  }
  for (const auto& c : crops) {
    char name[32];
    std::snprintf(name, sizeof name, "%05d.png", serial[c.label]++);
    write_image((dir / classifier::kClassNames[c.label] / name).string(), c.image);
  }
}

}  // namespace fundus::pipeline
