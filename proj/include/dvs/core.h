#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dvs/error.h"

namespace dvs {

using Label = std::int32_t;

// Axis-aligned pixel rectangle. Coordinates are frame pixels, top-left origin,
// y increasing downward.
struct Rect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  int right() const noexcept { return x + width; }
  int bottom() const noexcept { return y + height; }
  long area() const noexcept { return static_cast<long>(width) * height; }
  bool contains(int px, int py) const noexcept {
    return px >= x && px < right() && py >= y && py < bottom();
  }
  bool contains(const Rect& other) const noexcept {
    return other.x >= x && other.y >= y && other.right() <= right() &&
           other.bottom() <= bottom();
  }
  bool operator==(const Rect&) const = default;
};

// One frame region: the rectangle that is processed (core plus overlap halo)
// and the core rectangle it exclusively owns when outputs are stitched.
// Both rectangles are in frame coordinates.
struct RegionGeometry {
  Rect region;
  Rect core;

  int origin_x() const noexcept { return region.x; }
  int origin_y() const noexcept { return region.y; }
  int width() const noexcept { return region.width; }
  int height() const noexcept { return region.height; }
  bool operator==(const RegionGeometry&) const = default;
};

// Mutable row-major, channel-interleaved pixel buffer. Used to assemble data
// before it is frozen into one of the validated grid types below.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, int channels, T fill = T{})
      : width_(width), height_(height), channels_(channels) {
    if (width < 0 || height < 0 || channels < 1) {
      throw ShapeError("grid dimensions must be non-negative with >= 1 channel");
    }
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
  }
  Grid(int width, int height, int channels, std::vector<T> data)
      : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
    if (width < 0 || height < 0 || channels < 1) {
      throw ShapeError("grid dimensions must be non-negative with >= 1 channel");
    }
    if (data_.size() != static_cast<std::size_t>(width) * height * channels) {
      throw ShapeError("grid payload length does not match width*height*channels");
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * height_;
  }

  std::size_t index(int x, int y, int c = 0) const noexcept {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }
  T& at(int x, int y, int c = 0) noexcept { return data_[index(x, y, c)]; }
  const T& at(int x, int y, int c = 0) const noexcept { return data_[index(x, y, c)]; }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }
  std::vector<T> release() && { return std::move(data_); }

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 1;
  std::vector<T> data_;
};

// Intensity image with 1 (grayscale) or 3 (RGB) channels, values in [0,1].
class Image {
 public:
  Image() = default;
  Image(int width, int height, int channels, std::vector<float> data);
  explicit Image(Grid<float> grid);

  static Image filled(int width, int height, int channels, float value);

  int width() const noexcept { return grid_.width(); }
  int height() const noexcept { return grid_.height(); }
  int channels() const noexcept { return grid_.channels(); }
  std::size_t pixel_count() const noexcept { return grid_.pixel_count(); }
  float at(int x, int y, int c = 0) const noexcept { return grid_.at(x, y, c); }
  std::span<const float> data() const noexcept { return grid_.data(); }
  const Grid<float>& grid() const noexcept { return grid_; }

  bool operator==(const Image& other) const;

 private:
  void validate() const;
  Grid<float> grid_;
};

// Per-pixel class ids in [0, num_classes).
class LabelMap {
 public:
  LabelMap() = default;
  LabelMap(int width, int height, int num_classes, std::vector<Label> data);
  LabelMap(Grid<Label> grid, int num_classes);

  static LabelMap filled(int width, int height, int num_classes, Label value);

  int width() const noexcept { return grid_.width(); }
  int height() const noexcept { return grid_.height(); }
  int num_classes() const noexcept { return num_classes_; }
  std::size_t pixel_count() const noexcept { return grid_.pixel_count(); }
  Label at(int x, int y) const noexcept { return grid_.at(x, y); }
  std::span<const Label> data() const noexcept { return grid_.data(); }
  const Grid<Label>& grid() const noexcept { return grid_; }

  bool operator==(const LabelMap& other) const;

 private:
  void validate() const;
  Grid<Label> grid_;
  int num_classes_ = 1;
};

// Per-pixel (u, v) displacement in pixels; u points right, v points down.
class FlowField {
 public:
  FlowField() = default;
  FlowField(int width, int height, std::vector<float> interleaved_uv);
  explicit FlowField(Grid<float> grid);

  static FlowField uniform(int width, int height, float u, float v);

  int width() const noexcept { return grid_.width(); }
  int height() const noexcept { return grid_.height(); }
  std::size_t pixel_count() const noexcept { return grid_.pixel_count(); }
  float u(int x, int y) const noexcept { return grid_.at(x, y, 0); }
  float v(int x, int y) const noexcept { return grid_.at(x, y, 1); }
  std::span<const float> data() const noexcept { return grid_.data(); }
  const Grid<float>& grid() const noexcept { return grid_; }

  FlowField scaled(float k) const;
  bool operator==(const FlowField& other) const;

 private:
  void validate() const;
  Grid<float> grid_;
};

Image crop(const Image& frame, const Rect& rect);
LabelMap crop(const LabelMap& frame, const Rect& rect);
FlowField crop(const FlowField& frame, const Rect& rect);

inline Image crop(const Image& frame, const RegionGeometry& geom) { return crop(frame, geom.region); }
inline LabelMap crop(const LabelMap& frame, const RegionGeometry& geom) {
  return crop(frame, geom.region);
}
inline FlowField crop(const FlowField& frame, const RegionGeometry& geom) {
  return crop(frame, geom.region);
}

// Returns a copy of `frame` with `patch` written at (x, y).
LabelMap embed(const LabelMap& frame, const LabelMap& patch, int x, int y);

// BT.601 luma. One-channel input is returned unchanged.
Image to_grayscale(const Image& img);

void require_same_size(int w1, int h1, int w2, int h2, const char* what);

}  // namespace dvs
