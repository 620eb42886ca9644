#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fundus/error.hpp"

namespace fundus::imaging {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Integer pixel rectangle, half-open: covers [x, x + width) × [y, y + height).
struct Rect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  bool empty() const { return width <= 0 || height <= 0; }
  int right() const { return x + width; }
  int bottom() const { return y + height; }
  Point center() const { return {x + width / 2.0, y + height / 2.0}; }
  bool contains(Point p) const {
    return p.x >= x && p.x < right() && p.y >= y && p.y < bottom();
  }

  friend bool operator==(const Rect&, const Rect&) = default;
};

inline Rect intersect(const Rect& a, const Rect& b) {
  const int x0 = std::max(a.x, b.x);
  const int y0 = std::max(a.y, b.y);
  const int x1 = std::min(a.right(), b.right());
  const int y1 = std::min(a.bottom(), b.bottom());
  if (x1 <= x0 || y1 <= y0) return {x0, y0, 0, 0};
  return {x0, y0, x1 - x0, y1 - y0};
}

/// Planar image: channel c of pixel (x, y) lives at data[(c * height + y) * width + x].
/// Color samples are in [0, 1]; derived maps may hold any finite value.
class Raster {
public:
  Raster() = default;

  Raster(int width, int height, int channels, double fill = 0.0)
      : width_(width), height_(height), channels_(channels) {
    if (width < 1 || height < 1)
      throw invalid_input("raster dimensions must be positive, got " +
                          std::to_string(width) + "x" + std::to_string(height));
    if (channels != 1 && channels != 3)
      throw invalid_input("raster must have 1 or 3 channels, got " + std::to_string(channels));
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
  }

  Raster(int width, int height, int channels, std::vector<double> data)
      : Raster(width, height, channels) {
    if (data.size() != data_.size())
      throw invalid_input("raster data length does not match dimensions");
    data_ = std::move(data);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  bool empty() const { return data_.empty(); }
  std::size_t plane_size() const { return static_cast<std::size_t>(width_) * height_; }
  Rect bounds() const { return {0, 0, width_, height_}; }

  double& at(int x, int y, int c = 0) { return data_[index(x, y, c)]; }
  double at(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }

  std::span<double> plane(int c) { return {data_.data() + c * plane_size(), plane_size()}; }
  std::span<const double> plane(int c) const {
    return {data_.data() + c * plane_size(), plane_size()};
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  friend bool operator==(const Raster&, const Raster&) = default;

private:
  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(c) * height_ + y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

/// Binary map; nonzero bytes are foreground.
class Mask {
public:
  Mask() = default;
  Mask(int width, int height, bool fill = false)
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(width) * height, fill ? 1 : 0) {
    if (width < 1 || height < 1) throw invalid_input("mask dimensions must be positive");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  Rect bounds() const { return {0, 0, width_, height_}; }

  bool at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x] != 0; }
  void set(int x, int y, bool v) { data_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0; }

  std::span<std::uint8_t> data() { return data_; }
  std::span<const std::uint8_t> data() const { return data_; }

  std::size_t count() const {
    return static_cast<std::size_t>(std::count_if(data_.begin(), data_.end(), [](auto v) { return v != 0; }));
  }

  friend bool operator==(const Mask&, const Mask&) = default;

private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

inline void require_channels(const Raster& img, int channels, const char* op) {
  if (img.channels() != channels)
    throw invalid_input(std::string(op) + ": expected " + std::to_string(channels) +
                        "-channel raster, got " + std::to_string(img.channels()));
}

/// Copies the intersection of `roi` with the image; throws if it is empty.
inline Raster crop(const Raster& img, const Rect& roi) {
  const Rect r = intersect(roi, img.bounds());
  if (r.empty()) throw invalid_input("crop region lies outside the image");
  Raster out(r.width, r.height, img.channels());
  for (int c = 0; c < img.channels(); ++c)
    for (int y = 0; y < r.height; ++y)
      for (int x = 0; x < r.width; ++x) out.at(x, y, c) = img.at(r.x + x, r.y + y, c);
  return out;
}

/// Per-sample affine change followed by clipping to [0, 1].
inline Raster adjust_gain_bias(const Raster& img, double gain, double bias) {
  Raster out = img;
  for (double& v : out.data()) v = std::clamp(gain * v + bias, 0.0, 1.0);
  return out;
}

}  // namespace fundus::imaging
