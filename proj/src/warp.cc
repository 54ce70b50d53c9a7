#include "dvs/warp.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace dvs {
namespace {

struct Bilinear {
  int x0, y0, x1, y1;
  double w00, w10, w01, w11;
};

// Neighbour indices are clamped to the grid so border samples replicate.
Bilinear bilinear_at(double sx, double sy, int w, int h) {
  const double fx0 = std::floor(sx);
  const double fy0 = std::floor(sy);
  const double fx = sx - fx0;
  const double fy = sy - fy0;
  Bilinear b;
  b.x0 = std::clamp(static_cast<int>(fx0), 0, w - 1);
  b.y0 = std::clamp(static_cast<int>(fy0), 0, h - 1);
  b.x1 = std::clamp(static_cast<int>(fx0) + 1, 0, w - 1);
  b.y1 = std::clamp(static_cast<int>(fy0) + 1, 0, h - 1);
  b.w00 = (1.0 - fx) * (1.0 - fy);
  b.w10 = fx * (1.0 - fy);
  b.w01 = (1.0 - fx) * fy;
  b.w11 = fx * fy;
  return b;
}

bool outside_extent(double sx, double sy, int w, int h) {
  return sx < -0.5 || sy < -0.5 || sx >= w - 0.5 || sy >= h - 0.5;
}

Label onehot_argmax(const LabelMap& key, const Bilinear& b) {
  const Label labels[4] = {key.at(b.x0, b.y0), key.at(b.x1, b.y0), key.at(b.x0, b.y1),
                           key.at(b.x1, b.y1)};
  const double weights[4] = {b.w00, b.w10, b.w01, b.w11};
  Label best = labels[0];
  double best_w = -1.0;
  for (int i = 0; i < 4; ++i) {
    if (weights[i] <= 0.0) continue;
    double total = 0.0;
    for (int j = 0; j < 4; ++j) {
      if (labels[j] == labels[i]) total += weights[j];
    }
    if (total > best_w || (total == best_w && labels[i] < best)) {
      best = labels[i];
      best_w = total;
    }
  }
  return best;
}

}  // namespace

WarpConfig::Sampling WarpConfig::parse_sampling(std::string_view name) {
  if (name == "nearest") return Sampling::kNearestLabel;
  if (name == "bilinear") return Sampling::kOneHotBilinearArgmax;
  throw ConfigError("unknown warp sampling '" + std::string(name) +
                    "' (expected nearest|bilinear)");
}

LabelMap warp_labels(const LabelMap& key_seg, const FlowField& flow, const WarpConfig& cfg) {
  require_same_size(key_seg.width(), key_seg.height(), flow.width(), flow.height(),
                    "warp_labels");
  const int w = key_seg.width();
  const int h = key_seg.height();
  Grid<Label> out(w, h, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double sx = x - static_cast<double>(flow.u(x, y));
      const double sy = y - static_cast<double>(flow.v(x, y));
      if (cfg.out_of_bounds == WarpConfig::OutOfBounds::kKeepSource &&
          outside_extent(sx, sy, w, h)) {
        out.at(x, y) = key_seg.at(x, y);
        continue;
      }
      if (cfg.sampling == WarpConfig::Sampling::kNearestLabel) {
        const int ix = std::clamp(static_cast<int>(std::floor(sx + 0.5)), 0, w - 1);
        const int iy = std::clamp(static_cast<int>(std::floor(sy + 0.5)), 0, h - 1);
        out.at(x, y) = key_seg.at(ix, iy);
      } else {
        out.at(x, y) = onehot_argmax(key_seg, bilinear_at(sx, sy, w, h));
      }
    }
  }
  return LabelMap(std::move(out), key_seg.num_classes());
}

Image warp_image(const Image& key_img, const FlowField& flow) {
  require_same_size(key_img.width(), key_img.height(), flow.width(), flow.height(),
                    "warp_image");
  const int w = key_img.width();
  const int h = key_img.height();
  const int ch = key_img.channels();
  Grid<float> out(w, h, ch);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Bilinear b = bilinear_at(x - static_cast<double>(flow.u(x, y)),
                                     y - static_cast<double>(flow.v(x, y)), w, h);
      for (int c = 0; c < ch; ++c) {
        const double v = b.w00 * key_img.at(b.x0, b.y0, c) + b.w10 * key_img.at(b.x1, b.y0, c) +
                         b.w01 * key_img.at(b.x0, b.y1, c) + b.w11 * key_img.at(b.x1, b.y1, c);
        out.at(x, y, c) = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
    }
  }
  return Image(std::move(out));
}

FlowField compose_flows(const FlowField& first, const FlowField& second) {
  require_same_size(first.width(), first.height(), second.width(), second.height(),
                    "compose_flows");
  const int w = first.width();
  const int h = first.height();
  Grid<float> out(w, h, 2);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double su = second.u(x, y);
      const double sv = second.v(x, y);
      const Bilinear b = bilinear_at(x - su, y - sv, w, h);
      const double fu = b.w00 * first.u(b.x0, b.y0) + b.w10 * first.u(b.x1, b.y0) +
                        b.w01 * first.u(b.x0, b.y1) + b.w11 * first.u(b.x1, b.y1);
      const double fv = b.w00 * first.v(b.x0, b.y0) + b.w10 * first.v(b.x1, b.y0) +
                        b.w01 * first.v(b.x0, b.y1) + b.w11 * first.v(b.x1, b.y1);
      out.at(x, y, 0) = static_cast<float>(su + fu);
      out.at(x, y, 1) = static_cast<float>(sv + fv);
    }
  }
  return FlowField(std::move(out));
}

}  // namespace dvs
