#include "dvs/core.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace dvs {

void require_same_size(int w1, int h1, int w2, int h2, const char* what) {
  if (w1 != w2 || h1 != h2) {
    throw ShapeError(std::string(what) + ": dimension mismatch (" + std::to_string(w1) + "x" +
                     std::to_string(h1) + " vs " + std::to_string(w2) + "x" +
                     std::to_string(h2) + ")");
  }
}

// ---------------------------------------------------------------------------
// Image

Image::Image(int width, int height, int channels, std::vector<float> data)
    : grid_(width, height, channels, std::move(data)) {
  validate();
}

Image::Image(Grid<float> grid) : grid_(std::move(grid)) { validate(); }

Image Image::filled(int width, int height, int channels, float value) {
  return Image(Grid<float>(width, height, channels, value));
}

void Image::validate() const {
  if (grid_.channels() != 1 && grid_.channels() != 3) {
    throw ShapeError("image must have 1 or 3 channels");
  }
  for (float v : grid_.data()) {
    if (!std::isfinite(v) || v < 0.0f || v > 1.0f) {
      throw ValueError("image intensity outside [0,1]");
    }
  }
}

bool Image::operator==(const Image& other) const {
  return width() == other.width() && height() == other.height() &&
         channels() == other.channels() && std::ranges::equal(data(), other.data());
}

// ---------------------------------------------------------------------------
// LabelMap

LabelMap::LabelMap(int width, int height, int num_classes, std::vector<Label> data)
    : grid_(width, height, 1, std::move(data)), num_classes_(num_classes) {
  validate();
}

LabelMap::LabelMap(Grid<Label> grid, int num_classes)
    : grid_(std::move(grid)), num_classes_(num_classes) {
  validate();
}

LabelMap LabelMap::filled(int width, int height, int num_classes, Label value) {
  return LabelMap(Grid<Label>(width, height, 1, value), num_classes);
}

void LabelMap::validate() const {
  if (grid_.channels() != 1) throw ShapeError("label map must have one channel");
  if (num_classes_ < 1) throw ValueError("label map needs at least one class");
  for (Label id : grid_.data()) {
    if (id < 0 || id >= num_classes_) {
      throw ClassRangeError("label id " + std::to_string(id) + " outside [0, " +
                            std::to_string(num_classes_) + ")");
    }
  }
}

bool LabelMap::operator==(const LabelMap& other) const {
  return width() == other.width() && height() == other.height() &&
         num_classes() == other.num_classes() && std::ranges::equal(data(), other.data());
}

// ---------------------------------------------------------------------------
// FlowField

FlowField::FlowField(int width, int height, std::vector<float> interleaved_uv)
    : grid_(width, height, 2, std::move(interleaved_uv)) {
  validate();
}

FlowField::FlowField(Grid<float> grid) : grid_(std::move(grid)) { validate(); }

FlowField FlowField::uniform(int width, int height, float u, float v) {
  Grid<float> g(width, height, 2);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      g.at(x, y, 0) = u;
      g.at(x, y, 1) = v;
    }
  }
  return FlowField(std::move(g));
}

void FlowField::validate() const {
  if (grid_.channels() != 2) throw ShapeError("flow field must have two components");
  for (float v : grid_.data()) {
    if (!std::isfinite(v)) throw ValueError("flow component is not finite");
  }
}

FlowField FlowField::scaled(float k) const {
  Grid<float> g = grid_;
  for (float& v : g.data()) v *= k;
  return FlowField(std::move(g));
}

bool FlowField::operator==(const FlowField& other) const {
  return width() == other.width() && height() == other.height() &&
         std::ranges::equal(data(), other.data());
}

// ---------------------------------------------------------------------------
// crop / embed

namespace {

void check_bounds(const Rect& r, int width, int height) {
  if (r.x < 0 || r.y < 0 || r.width < 0 || r.height < 0 || r.right() > width ||
      r.bottom() > height) {
    throw BoundsError("rectangle (" + std::to_string(r.x) + "," + std::to_string(r.y) + " " +
                      std::to_string(r.width) + "x" + std::to_string(r.height) +
                      ") outside " + std::to_string(width) + "x" + std::to_string(height) +
                      " grid");
  }
}

template <typename T>
Grid<T> crop_grid(const Grid<T>& src, const Rect& r) {
  check_bounds(r, src.width(), src.height());
  Grid<T> out(r.width, r.height, src.channels());
  const int row_len = r.width * src.channels();
  for (int y = 0; y < r.height; ++y) {
    const T* from = &src.at(r.x, r.y + y);
    std::copy(from, from + row_len, &out.at(0, y));
  }
  return out;
}

}  // namespace

Image crop(const Image& frame, const Rect& rect) { return Image(crop_grid(frame.grid(), rect)); }

LabelMap crop(const LabelMap& frame, const Rect& rect) {
  return LabelMap(crop_grid(frame.grid(), rect), frame.num_classes());
}

FlowField crop(const FlowField& frame, const Rect& rect) {
  return FlowField(crop_grid(frame.grid(), rect));
}

LabelMap embed(const LabelMap& frame, const LabelMap& patch, int x, int y) {
  check_bounds(Rect{x, y, patch.width(), patch.height()}, frame.width(), frame.height());
  Grid<Label> out = frame.grid();
  for (int py = 0; py < patch.height(); ++py) {
    for (int px = 0; px < patch.width(); ++px) out.at(x + px, y + py) = patch.at(px, py);
  }
  return LabelMap(std::move(out), std::max(frame.num_classes(), patch.num_classes()));
}

Image to_grayscale(const Image& img) {
  if (img.channels() == 1) return img;
  Grid<float> out(img.width(), img.height(), 1);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double luma = 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) +
                          0.114 * img.at(x, y, 2);
      out.at(x, y) = static_cast<float>(std::clamp(luma, 0.0, 1.0));
    }
  }
  return Image(std::move(out));
}

}  // namespace dvs
