#include "dvs/oracle.h"

#include <algorithm>
#include <cmath>

#include "dvs/warp.h"

namespace dvs {

void SceneSpec::validate() const {
  if (frame_w < 1 || frame_h < 1) throw ConfigError("scene frame size must be positive");
  if (num_classes < 2) throw ConfigError("scene needs at least 2 classes");
  if (sequence_length < 2) throw ConfigError("sequence_length must be >= 2");
  if (!(flicker >= 0.0 && flicker < 0.5)) throw ConfigError("flicker must be in [0, 0.5)");
  for (const ObjectSpec& o : objects) {
    if (o.cls < 1 || o.cls >= num_classes) {
      throw ConfigError("object class " + std::to_string(o.cls) + " outside [1, " +
                        std::to_string(num_classes) + ")");
    }
    if (o.shape == Shape::kRectangle && !(o.width > 0 && o.height > 0)) {
      throw ConfigError("rectangle needs positive width and height");
    }
    if (o.shape == Shape::kDisc && !(o.radius > 0)) throw ConfigError("disc needs radius > 0");
    if (!(o.jitter >= 0)) throw ConfigError("jitter must be >= 0");
    for (double v : {o.x, o.y, o.vx, o.vy, o.jitter, o.width, o.height, o.radius}) {
      if (!std::isfinite(v)) throw ConfigError("object parameters must be finite");
    }
  }
}

BackendSpec BackendSpec::noise_free() {
  BackendSpec b;
  b.seg_noise_rate = 0.0;
  b.flow_noise_sigma = 0.0;
  return b;
}

void BackendSpec::validate() const {
  if (!(seg_noise_rate >= 0.0 && seg_noise_rate <= 1.0)) {
    throw ConfigError("seg_noise must be in [0, 1]");
  }
  if (!(flow_noise_sigma >= 0.0) || !std::isfinite(flow_noise_sigma)) {
    throw ConfigError("flow_noise must be >= 0");
  }
  if (!(seg_cost > 0 && flow_cost > 0 && dn_cost > 0)) {
    throw ConfigError("backend costs must be > 0");
  }
  if (!(seg_cost > flow_cost)) throw ConfigError("seg_cost must exceed flow_cost");
}

std::array<float, 3> class_color(Label cls) {
  static constexpr std::array<std::array<float, 3>, 8> kPalette = {{
      {0.30f, 0.30f, 0.30f},
      {0.80f, 0.45f, 0.40f},
      {0.55f, 0.85f, 0.55f},
      {0.35f, 0.45f, 0.75f},
      {0.90f, 0.80f, 0.35f},
      {0.60f, 0.60f, 0.90f},
      {0.15f, 0.20f, 0.15f},
      {0.95f, 0.95f, 0.95f},
  }};
  const auto base = kPalette[static_cast<std::size_t>(cls) % kPalette.size()];
  const float shift = 0.04f * static_cast<float>((cls / 8) % 4);
  return {std::clamp(base[0] - shift, 0.0f, 1.0f), base[1], std::clamp(base[2] + shift, 0.0f, 1.0f)};
}

namespace {

bool covers(const ObjectSpec& o, double cx, double cy, double px, double py) {
  if (o.shape == Shape::kRectangle) {
    return std::abs(px - cx) < 0.5 * o.width && std::abs(py - cy) < 0.5 * o.height;
  }
  const double dx = px - cx;
  const double dy = py - cy;
  return dx * dx + dy * dy < o.radius * o.radius;
}

constexpr std::uint64_t kFlickerCounter = 1u << 20;

}  // namespace

std::vector<FrameBundle> render_sequence(const SceneSpec& spec) {
  spec.validate();
  const int w = spec.frame_w;
  const int h = spec.frame_h;
  const std::size_t n_obj = spec.objects.size();

  std::vector<std::pair<double, double>> pos(n_obj);
  for (std::size_t o = 0; o < n_obj; ++o) pos[o] = {spec.objects[o].x, spec.objects[o].y};

  std::vector<FrameBundle> frames;
  frames.reserve(static_cast<std::size_t>(spec.sequence_length));
  for (int f = 0; f < spec.sequence_length; ++f) {
    if (f > 0) {
      for (std::size_t o = 0; o < n_obj; ++o) {
        const ObjectSpec& obj = spec.objects[o];
        double vx = obj.vx;
        double vy = obj.vy;
        if (obj.jitter > 0.0) {
          RandomStream rng(spec.rng_seed, StreamTag::kScene, {o, static_cast<std::uint64_t>(f)});
          vx += obj.jitter * rng.normal();
          vy += obj.jitter * rng.normal();
        }
        pos[o].first += vx;
        pos[o].second += vy;
      }
    }

    double offset = 0.0;
    if (spec.flicker > 0.0) {
      RandomStream rng(spec.rng_seed, StreamTag::kScene,
                       {kFlickerCounter, static_cast<std::uint64_t>(f)});
      offset = spec.flicker * (2.0 * rng.uniform() - 1.0);
    }

    Grid<std::int32_t> owner(w, h, 1, -1);
    Grid<Label> labels(w, h, 1, Label{0});
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        for (std::size_t o = n_obj; o-- > 0;) {  // front-most object wins
          if (covers(spec.objects[o], pos[o].first, pos[o].second, x + 0.5, y + 0.5)) {
            owner.at(x, y) = static_cast<std::int32_t>(o);
            labels.at(x, y) = spec.objects[o].cls;
            break;
          }
        }
      }
    }

    Grid<float> img(w, h, 3);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const auto rgb = class_color(labels.at(x, y));
        for (int c = 0; c < 3; ++c) {
          img.at(x, y, c) = static_cast<float>(std::clamp(rgb[c] + offset, 0.0, 1.0));
        }
      }
    }

    FrameBundle b;
    b.index = f;
    b.image = Image(std::move(img));
    b.truth_labels = LabelMap(std::move(labels), spec.num_classes);
    b.owner = std::move(owner);
    b.positions = pos;
    frames.push_back(std::move(b));
  }
  return frames;
}

FlowField truth_flow(std::span<const FrameBundle> bundles, int key, int cur, const Rect& rect) {
  const int n = static_cast<int>(bundles.size());
  if (key < 0 || cur < 0 || key >= n || cur >= n) {
    throw SequenceError("frame index outside sequence of length " + std::to_string(n));
  }
  const FrameBundle& kb = bundles[static_cast<std::size_t>(key)];
  const FrameBundle& cb = bundles[static_cast<std::size_t>(cur)];
  if (rect.x < 0 || rect.y < 0 || rect.right() > cb.owner.width() ||
      rect.bottom() > cb.owner.height()) {
    throw BoundsError("truth_flow rectangle outside frame");
  }
  Grid<float> g(rect.width, rect.height, 2, 0.0f);
  for (int y = 0; y < rect.height; ++y) {
    for (int x = 0; x < rect.width; ++x) {
      const std::int32_t o = cb.owner.at(rect.x + x, rect.y + y);
      if (o < 0) continue;
      const auto& pc = cb.positions[static_cast<std::size_t>(o)];
      const auto& pk = kb.positions[static_cast<std::size_t>(o)];
      g.at(x, y, 0) = static_cast<float>(pc.first - pk.first);
      g.at(x, y, 1) = static_cast<float>(pc.second - pk.second);
    }
  }
  return FlowField(std::move(g));
}

FlowField truth_flow(std::span<const FrameBundle> bundles, int key, int cur) {
  if (bundles.empty()) throw SequenceError("empty sequence");
  const Image& img = bundles.front().image;
  return truth_flow(bundles, key, cur, Rect{0, 0, img.width(), img.height()});
}

LabelMap seg_oracle(const Image& region_img, const LabelMap& truth, const BackendSpec& spec,
                    const PixelNoise& noise) {
  require_same_size(region_img.width(), region_img.height(), truth.width(), truth.height(),
                    "seg_oracle");
  if (spec.seg_noise_rate <= 0.0) return truth;
  Grid<Label> out = truth.grid();
  const auto k = static_cast<std::uint64_t>(truth.num_classes());
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      RandomStream rng = noise.at(x, y);
      if (rng.bernoulli(spec.seg_noise_rate)) out.at(x, y) = static_cast<Label>(rng.below(k));
    }
  }
  return LabelMap(std::move(out), truth.num_classes());
}

FlowField flow_oracle(int key_idx, int cur_idx, std::span<const FrameBundle> bundles,
                      const RegionGeometry& geom, const BackendSpec& spec,
                      const PixelNoise& noise) {
  if (key_idx >= cur_idx) {
    throw SequenceError("flow_oracle: key frame " + std::to_string(key_idx) +
                        " must precede current frame " + std::to_string(cur_idx));
  }
  FlowField exact = truth_flow(bundles, key_idx, cur_idx, geom.region);
  if (spec.flow_noise_sigma <= 0.0) return exact;
  Grid<float> g = exact.grid();
  const PixelNoise local = noise.offset(geom.region.x, geom.region.y);
  for (int y = 0; y < g.height(); ++y) {
    for (int x = 0; x < g.width(); ++x) {
      RandomStream rng = local.at(x, y);
      g.at(x, y, 0) += static_cast<float>(spec.flow_noise_sigma * rng.normal());
      g.at(x, y, 1) += static_cast<float>(spec.flow_noise_sigma * rng.normal());
    }
  }
  return FlowField(std::move(g));
}

double disocclusion_fraction(std::span<const FrameBundle> bundles, int key, int cur,
                             const Rect& rect) {
  const FlowField flow = truth_flow(bundles, key, cur, rect);
  const LabelMap key_truth = crop(bundles[static_cast<std::size_t>(key)].truth_labels, rect);
  const LabelMap cur_truth = crop(bundles[static_cast<std::size_t>(cur)].truth_labels, rect);
  const LabelMap warped = warp_labels(key_truth, flow);
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < warped.data().size(); ++i) {
    wrong += warped.data()[i] != cur_truth.data()[i];
  }
  return static_cast<double>(wrong) / static_cast<double>(warped.pixel_count());
}

}  // namespace dvs
