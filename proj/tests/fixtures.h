#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "dvs/core.h"

namespace dvs::testing {

inline LabelMap random_labels(std::mt19937_64& g, int w, int h, int k) {
  std::uniform_int_distribution<Label> d(0, k - 1);
  std::vector<Label> v(static_cast<std::size_t>(w) * h);
  for (Label& x : v) x = d(g);
  return LabelMap(w, h, k, std::move(v));
}

inline Image random_image(std::mt19937_64& g, int w, int h, int c) {
  std::uniform_real_distribution<float> d(0.0f, 1.0f);
  std::vector<float> v(static_cast<std::size_t>(w) * h * c);
  for (float& x : v) x = d(g);
  return Image(w, h, c, std::move(v));
}

inline FlowField random_flow(std::mt19937_64& g, int w, int h, float amp) {
  std::uniform_real_distribution<float> d(-amp, amp);
  std::vector<float> v(static_cast<std::size_t>(w) * h * 2);
  for (float& x : v) x = d(g);
  return FlowField(w, h, std::move(v));
}

// Plain double-loop references, written without the library's helpers.

inline double naive_confidence(const LabelMap& a, const LabelMap& b) {
  long same = 0;
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x)
      if (a.at(x, y) == b.at(x, y)) ++same;
  return static_cast<double>(same) / (static_cast<double>(a.width()) * a.height());
}

inline double naive_gray(const Image& img, int x, int y) {
  if (img.channels() == 1) return img.at(x, y);
  return 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) + 0.114 * img.at(x, y, 2);
}

inline double naive_frame_diff(const Image& a, const Image& b) {
  double s = 0.0;
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x) s += std::fabs(naive_gray(a, x, y) - naive_gray(b, x, y));
  return s / (static_cast<double>(a.width()) * a.height());
}

inline double naive_flow_mag(const FlowField& f) {
  double s = 0.0;
  for (int y = 0; y < f.height(); ++y)
    for (int x = 0; x < f.width(); ++x) {
      const double u = f.u(x, y);
      const double v = f.v(x, y);
      s += std::sqrt(u * u + v * v);
    }
  return s / (static_cast<double>(f.width()) * f.height());
}

// Per class: count TP, FP, FN by scanning the maps directly.
inline double naive_miou(const LabelMap& truth, const LabelMap& pred) {
  double sum = 0.0;
  int present = 0;
  for (int c = 0; c < truth.num_classes(); ++c) {
    long tp = 0, fp = 0, fn = 0;
    for (int y = 0; y < truth.height(); ++y)
      for (int x = 0; x < truth.width(); ++x) {
        const bool t = truth.at(x, y) == c;
        const bool p = pred.at(x, y) == c;
        if (t && p) ++tp;
        else if (p) ++fp;
        else if (t) ++fn;
      }
    if (tp + fp + fn == 0) continue;
    sum += static_cast<double>(tp) / static_cast<double>(tp + fp + fn);
    ++present;
  }
  return sum / present;
}

}  // namespace dvs::testing
