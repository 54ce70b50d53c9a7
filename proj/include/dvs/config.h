#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "dvs/oracle.h"

namespace dvs {

// Experiment description read from a flat `key = value` text file.
//
//   # comment
//   scene = heterogeneous        # preset name
//   frame_w = 128
//   frame_h = 128
//   num_classes = 4
//   sequence_length = 20
//   seed = 7
//   flicker = 0.05
//   object = rect class=1 x=40 y=40 w=20 h=12 vx=1 vy=0 jitter=0
//   object = disc class=2 x=90 y=30 r=10 vx=0 vy=1
//   seg_noise = 0.02
//   flow_noise = 0.25
//   seg_cost = 10
//   flow_cost = 1
//   dn_cost = 0.1
//
// `object` lines replace the preset's objects. Unknown keys are errors.
struct ExperimentConfig {
  ScenePreset preset = ScenePreset::kHeterogeneous;
  int frame_w = 128;
  int frame_h = 128;
  int num_classes = 4;
  int sequence_length = 20;
  std::uint64_t seed = 1;
  std::optional<double> flicker;
  std::vector<ObjectSpec> objects;  // empty: use the preset
  BackendSpec backends;

  // Materializes the scene for `seed` (the preset layout depends on it).
  SceneSpec scene() const;
  SceneSpec scene(std::uint64_t seed_override) const;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace dvs
