#pragma once

#include <string>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "fundus/imaging/raster.hpp"

namespace fundus::pipeline {

using imaging::Raster;

/// Decodes PNG, JPEG, TIFF or PPM into a planar raster in [0, 1]; 8- and
/// 16-bit samples are normalised by their full-scale value. Alpha is dropped.
inline Raster read_image(const std::string& path) {
  const cv::Mat m = cv::imread(path, cv::IMREAD_ANYDEPTH | cv::IMREAD_ANYCOLOR);
  if (m.empty()) throw io_error("cannot decode image " + path);
  double scale = 1.0;
  switch (m.depth()) {
    case CV_8U: scale = 1.0 / 255.0; break;
    case CV_16U: scale = 1.0 / 65535.0; break;
    case CV_32F:
    case CV_64F: scale = 1.0; break;
    default: throw format_error(path + ": unsupported sample depth");
  }
  cv::Mat f;
  m.convertTo(f, CV_64F, scale);
  const int channels = f.channels() == 1 ? 1 : 3;
  Raster out(f.cols, f.rows, channels);
  for (int y = 0; y < f.rows; ++y) {
    const double* row = f.ptr<double>(y);
    for (int x = 0; x < f.cols; ++x) {
      if (channels == 1) {
        out.at(x, y) = row[x];
      } else {
        // OpenCV stores BGR(A).
        const double* px = row + static_cast<std::ptrdiff_t>(x) * f.channels();
        out.at(x, y, 0) = px[2];
        out.at(x, y, 1) = px[1];
        out.at(x, y, 2) = px[0];
      }
    }
  }
  return out;
}

/// Colour input for the detector; grayscale files are replicated to RGB.
inline Raster read_rgb(const std::string& path) {
  Raster img = read_image(path);
  if (img.channels() == 3) return img;
  Raster rgb(img.width(), img.height(), 3);
  for (int c = 0; c < 3; ++c) std::copy(img.plane(0).begin(), img.plane(0).end(), rgb.plane(c).begin());
  return rgb;
}

/// 8-bit PNG (or any extension OpenCV recognises); samples are clamped to [0, 1].
inline void write_image(const std::string& path, const Raster& img) {
  cv::Mat m(img.height(), img.width(), img.channels() == 1 ? CV_8UC1 : CV_8UC3);
  for (int y = 0; y < img.height(); ++y) {
    auto* row = m.ptr<unsigned char>(y);
    for (int x = 0; x < img.width(); ++x) {
      auto q = [&](int c) {
        return static_cast<unsigned char>(std::lround(std::clamp(img.at(x, y, c), 0.0, 1.0) * 255.0));
      };
      if (img.channels() == 1) {
        row[x] = q(0);
      } else {
        row[3 * x + 0] = q(2);
        row[3 * x + 1] = q(1);
        row[3 * x + 2] = q(0);
      }
    }
  }
  if (!cv::imwrite(path, m)) throw io_error("cannot write image " + path);
}

/// Linearly rescales a map to [0, 1] for inspection dumps.
inline Raster normalized_for_display(const Raster& map) {
  Raster out = map;
  double lo = 1e300, hi = -1e300;
  for (double v : map.data()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  for (double& v : out.data()) v = hi > lo ? (v - lo) / (hi - lo) : 0.0;
  return out;
}

inline Raster mask_to_raster(const imaging::Mask& m) {
  Raster out(m.width(), m.height(), 1);
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) out.at(x, y) = m.at(x, y) ? 1.0 : 0.0;
  return out;
}

}  // namespace fundus::pipeline
