#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dvs/core.h"

namespace dvs {

enum class SchemeName { kOriginal, kHalf, k2x2, k3x3, k4x4 };

struct DivisionScheme {
  SchemeName name = SchemeName::k2x2;
  int rows = 2;
  int cols = 2;
  int overlap = 0;  // pixels added on each interior edge

  static DivisionScheme make(SchemeName name, int overlap = 0);
  // Accepts original|half|2x2|3x3|4x4.
  static DivisionScheme parse(std::string_view name, int overlap = 0);

  int region_count() const noexcept { return rows * cols; }
  std::string label() const;
};

std::string_view to_string(SchemeName name);

// Cuts a frame into rows x cols core tiles (the last row and column absorb
// any remainder) and grows each tile by `overlap` on its interior edges,
// clamped to the frame. Regions are returned in row-major order.
std::vector<RegionGeometry> make_regions(const DivisionScheme& scheme, int frame_w, int frame_h);

// Rebuilds a full-frame map: every pixel is read from the region whose core
// owns it.
LabelMap stitch(std::span<const RegionGeometry> geoms, std::span<const LabelMap> maps);

// Total pixels processed when every region is visited once.
long region_pixel_total(std::span<const RegionGeometry> geoms);

}  // namespace dvs
