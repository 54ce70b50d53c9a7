#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dvs/core.h"
#include "dvs/rng.h"

namespace dvs {

enum class Shape { kRectangle, kDisc };

// A rigidly translating object. Position is the shape centre in pixels.
struct ObjectSpec {
  Shape shape = Shape::kRectangle;
  Label cls = 1;
  double x = 0.0;
  double y = 0.0;
  double width = 16.0;   // rectangle only
  double height = 16.0;  // rectangle only
  double radius = 8.0;   // disc only
  double vx = 0.0;       // px per frame
  double vy = 0.0;
  double jitter = 0.0;   // std-dev of per-frame velocity perturbation, px

  bool moving() const noexcept { return vx != 0.0 || vy != 0.0 || jitter != 0.0; }
};

struct SceneSpec {
  int frame_w = 128;
  int frame_h = 128;
  int num_classes = 4;  // class 0 is background
  int sequence_length = 20;
  std::vector<ObjectSpec> objects;  // drawn back to front
  std::uint64_t rng_seed = 1;
  // Amplitude of a global per-frame intensity offset drawn uniformly from
  // [-flicker, flicker]. Zero disables flicker.
  double flicker = 0.0;

  void validate() const;
};

// Noise and cost parameters of the two synthetic backends.
struct BackendSpec {
  double seg_noise_rate = 0.02;
  double flow_noise_sigma = 0.25;
  double seg_cost = 10.0;
  double flow_cost = 1.0;
  double dn_cost = 0.1;

  static BackendSpec noise_free();
  void validate() const;
};

struct FrameBundle {
  int index = 0;
  Image image;
  LabelMap truth_labels;
  // Index of the object visible at each pixel, -1 for background.
  Grid<std::int32_t> owner;
  // Centre of every object at this frame, in scene order.
  std::vector<std::pair<double, double>> positions;
};

// Per-class RGB colour used by the renderer.
std::array<float, 3> class_color(Label cls);

std::vector<FrameBundle> render_sequence(const SceneSpec& spec);

// Exact displacement from frame `key` to frame `cur` for every pixel of
// `rect` in the current frame (backward convention: the content at p in
// `cur` was at p - flow(p) in `key`). Background is static.
FlowField truth_flow(std::span<const FrameBundle> bundles, int key, int cur, const Rect& rect);
FlowField truth_flow(std::span<const FrameBundle> bundles, int key, int cur);

// Ground truth with a fraction `seg_noise_rate` of pixels relabelled
// uniformly over all classes. `noise` must already be offset to the
// region's origin.
LabelMap seg_oracle(const Image& region_img, const LabelMap& truth, const BackendSpec& spec,
                    const PixelNoise& noise);

// Ground-truth flow for the region plus i.i.d. N(0, sigma^2) per component.
// `noise` is anchored at the frame origin; the region offset comes from geom.
FlowField flow_oracle(int key_idx, int cur_idx, std::span<const FrameBundle> bundles,
                      const RegionGeometry& geom, const BackendSpec& spec,
                      const PixelNoise& noise);

// Fraction of pixels where the current truth differs from the key truth
// warped along the exact flow, i.e. content a warp cannot recover.
double disocclusion_fraction(std::span<const FrameBundle> bundles, int key, int cur,
                             const Rect& rect);

// ---------------------------------------------------------------------------
// Scene presets, laid out for 128x128 and scaled to the requested size.

enum class ScenePreset {
  kStatic,          // nothing moves
  kHeterogeneous,   // two quadrants static, two with moving objects
  kMostlyStatic,    // one slow object, everything else static
  kFlicker,         // static objects under global intensity flicker
  kLocalized,       // all motion confined to one quadrant
  kBorderCrossing,  // objects travelling across interior region borders
  kRandom,          // randomized layout and motion, the DN training world
};

ScenePreset parse_preset(std::string_view name);
std::string_view to_string(ScenePreset preset);

SceneSpec make_scene(ScenePreset preset, std::uint64_t seed, int frame_w = 128,
                     int frame_h = 128, int sequence_length = 20);

// The default synthetic distribution used to train the decision network.
std::vector<SceneSpec> training_scenes(int count, std::uint64_t seed, int frame_w = 128,
                                       int frame_h = 128, int sequence_length = 20);

}  // namespace dvs
