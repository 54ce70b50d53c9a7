#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "dvs/oracle.h"

namespace dvs {
namespace {

ObjectSpec rect(Label cls, double x, double y, double w, double h, double vx = 0,
                double vy = 0) {
  ObjectSpec o;
  o.shape = Shape::kRectangle;
  o.cls = cls;
  o.x = x;
  o.y = y;
  o.width = w;
  o.height = h;
  o.vx = vx;
  o.vy = vy;
  return o;
}

ObjectSpec disc(Label cls, double x, double y, double r, double vx = 0, double vy = 0) {
  ObjectSpec o;
  o.shape = Shape::kDisc;
  o.cls = cls;
  o.x = x;
  o.y = y;
  o.radius = r;
  o.vx = vx;
  o.vy = vy;
  return o;
}

// Quadrant layout shared by most presets; `speed` scales the two movers.
std::vector<ObjectSpec> quadrant_layout(RandomStream& rng, double speed) {
  auto p = [&] { return rng.uniform(-4.0, 4.0); };
  auto k = [&] { return speed * rng.uniform(0.8, 1.2); };
  return {
      rect(1, 30 + p(), 30 + p(), 26, 20),
      rect(2, 46 + p(), 48 + p(), 12, 12),
      disc(3, 30 + p(), 96 + p(), 13),
      disc(2, 82 + p(), 22 + p(), 11, 1.2 * k(), 0.9 * k()),
      rect(1, 84 + p(), 86 + p(), 22, 18, 1.1 * k(), 1.0 * k()),
  };
}

// Few large static shapes covering most of the frame.
std::vector<ObjectSpec> large_layout(RandomStream& rng) {
  auto p = [&] { return rng.uniform(-3.0, 3.0); };
  return {
      rect(1, 32 + p(), 32 + p(), 52, 56),
      disc(2, 94 + p(), 32 + p(), 28),
      rect(3, 64 + p(), 100 + p(), 96, 32),
  };
}

std::vector<ObjectSpec> random_layout(RandomStream& rng, int num_classes) {
  const int n = 3 + static_cast<int>(rng.below(4));
  std::vector<ObjectSpec> objs;
  for (int i = 0; i < n; ++i) {
    const Label cls = 1 + static_cast<Label>(rng.below(static_cast<std::uint64_t>(num_classes - 1)));
    const double x = rng.uniform(10, 118);
    const double y = rng.uniform(10, 118);
    ObjectSpec o = rng.bernoulli(0.5) ? rect(cls, x, y, rng.uniform(10, 34), rng.uniform(10, 34))
                                      : disc(cls, x, y, rng.uniform(6, 16));
    if (rng.bernoulli(0.6)) {
      const double speed = rng.uniform(0.3, 2.5);
      const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
      o.vx = speed * std::cos(angle);
      o.vy = speed * std::sin(angle);
      if (rng.bernoulli(0.25)) o.jitter = rng.uniform(0.05, 0.3);
    }
    objs.push_back(o);
  }
  return objs;
}

void scale_scene(SceneSpec& s) {
  const double sx = s.frame_w / 128.0;
  const double sy = s.frame_h / 128.0;
  if (sx == 1.0 && sy == 1.0) return;
  const double sr = std::min(sx, sy);
  for (ObjectSpec& o : s.objects) {
    o.x *= sx;
    o.width *= sx;
    o.vx *= sx;
    o.y *= sy;
    o.height *= sy;
    o.vy *= sy;
    o.radius *= sr;
    o.jitter *= sr;
  }
}

}  // namespace

ScenePreset parse_preset(std::string_view name) {
  for (ScenePreset p : {ScenePreset::kStatic, ScenePreset::kHeterogeneous,
                        ScenePreset::kMostlyStatic, ScenePreset::kFlicker,
                        ScenePreset::kLocalized, ScenePreset::kBorderCrossing,
                        ScenePreset::kRandom}) {
    if (to_string(p) == name) return p;
  }
  throw ConfigError("unknown scene preset '" + std::string(name) + "'");
}

std::string_view to_string(ScenePreset preset) {
  switch (preset) {
    case ScenePreset::kStatic: return "static";
    case ScenePreset::kHeterogeneous: return "heterogeneous";
    case ScenePreset::kMostlyStatic: return "mostly_static";
    case ScenePreset::kFlicker: return "flicker";
    case ScenePreset::kLocalized: return "localized";
    case ScenePreset::kBorderCrossing: return "border_crossing";
    case ScenePreset::kRandom: return "random";
  }
  return "?";
}

SceneSpec make_scene(ScenePreset preset, std::uint64_t seed, int frame_w, int frame_h,
                     int sequence_length) {
  SceneSpec s;
  s.frame_w = frame_w;
  s.frame_h = frame_h;
  s.sequence_length = sequence_length;
  s.num_classes = 4;
  s.rng_seed = seed;
  RandomStream rng(seed, StreamTag::kPreset, {static_cast<std::uint64_t>(preset)});
  switch (preset) {
    case ScenePreset::kStatic:
      s.objects = quadrant_layout(rng, 0.0);
      break;
    case ScenePreset::kHeterogeneous:
      s.objects = quadrant_layout(rng, 1.0);
      break;
    case ScenePreset::kMostlyStatic:
      s.objects = large_layout(rng);
      s.objects.push_back(disc(2, 64 + rng.uniform(-2, 2), 66 + rng.uniform(-2, 2), 8,
                               0.15 * rng.uniform(0.8, 1.2), 0.1 * rng.uniform(0.8, 1.2)));
      break;
    case ScenePreset::kFlicker:
      s.objects = large_layout(rng);
      s.flicker = 0.05;
      break;
    case ScenePreset::kLocalized: {
      s.objects = quadrant_layout(rng, 1.0);
      s.objects[4].vx = s.objects[4].vy = 0.0;
      const double k = rng.uniform(0.8, 1.2);
      s.objects.push_back(rect(3, 104 + rng.uniform(-3, 3), 40 + rng.uniform(-3, 3), 14, 14,
                               -0.8 * k, 0.6 * k));
      break;
    }
    case ScenePreset::kBorderCrossing: {
      auto p = [&] { return rng.uniform(-3.0, 3.0); };
      const double k = rng.uniform(0.9, 1.1);
      s.objects = {
          rect(1, 44 + p(), 30 + p(), 20, 16, 2.0 * k, 0.0),
          disc(2, 96 + p(), 44 + p(), 10, 0.0, 2.0 * k),
          rect(3, 84 + p(), 100 + p(), 18, 18, -2.0 * k, 0.0),
          disc(1, 30 + p(), 84 + p(), 9, 0.0, -1.8 * k),
      };
      break;
    }
    case ScenePreset::kRandom:
      s.objects = random_layout(rng, s.num_classes);
      if (rng.bernoulli(0.3)) s.flicker = rng.uniform(0.02, 0.06);
      break;
  }
  scale_scene(s);
  s.validate();
  return s;
}

std::vector<SceneSpec> training_scenes(int count, std::uint64_t seed, int frame_w, int frame_h,
                                       int sequence_length) {
  std::vector<SceneSpec> out;
  for (int i = 0; i < count; ++i) {
    const std::uint64_t scene_seed = derive_key(seed, StreamTag::kPreset, {static_cast<std::uint64_t>(i)});
    out.push_back(make_scene(ScenePreset::kRandom, scene_seed, frame_w, frame_h, sequence_length));
  }
  return out;
}

}  // namespace dvs
