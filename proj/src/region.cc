#include "dvs/region.h"

#include <algorithm>

namespace dvs {

std::string_view to_string(SchemeName name) {
  switch (name) {
    case SchemeName::kOriginal: return "original";
    case SchemeName::kHalf: return "half";
    case SchemeName::k2x2: return "2x2";
    case SchemeName::k3x3: return "3x3";
    case SchemeName::k4x4: return "4x4";
  }
  return "?";
}

DivisionScheme DivisionScheme::make(SchemeName name, int overlap) {
  if (overlap < 0) throw ConfigError("overlap depth must be >= 0");
  switch (name) {
    case SchemeName::kOriginal: return {name, 1, 1, overlap};
    case SchemeName::kHalf: return {name, 1, 2, overlap};
    case SchemeName::k2x2: return {name, 2, 2, overlap};
    case SchemeName::k3x3: return {name, 3, 3, overlap};
    case SchemeName::k4x4: return {name, 4, 4, overlap};
  }
  throw ConfigError("unknown division scheme");
}

DivisionScheme DivisionScheme::parse(std::string_view name, int overlap) {
  for (SchemeName s : {SchemeName::kOriginal, SchemeName::kHalf, SchemeName::k2x2,
                       SchemeName::k3x3, SchemeName::k4x4}) {
    if (to_string(s) == name) return make(s, overlap);
  }
  throw ConfigError("unknown division scheme '" + std::string(name) +
                    "' (expected original|half|2x2|3x3|4x4)");
}

std::string DivisionScheme::label() const { return std::string(to_string(name)); }

std::vector<RegionGeometry> make_regions(const DivisionScheme& scheme, int frame_w, int frame_h) {
  if (scheme.rows < 1 || scheme.cols < 1) throw ConfigError("scheme needs >= 1 row and column");
  if (frame_w < scheme.cols || frame_h < scheme.rows) {
    throw ConfigError("frame too small for division scheme " + scheme.label());
  }
  const int tile_w = frame_w / scheme.cols;
  const int tile_h = frame_h / scheme.rows;
  if (scheme.overlap < 0 || scheme.overlap > std::min(tile_w, tile_h)) {
    throw ConfigError("overlap depth " + std::to_string(scheme.overlap) +
                      " exceeds the smallest core tile dimension " +
                      std::to_string(std::min(tile_w, tile_h)));
  }
  std::vector<RegionGeometry> out;
  out.reserve(static_cast<std::size_t>(scheme.region_count()));
  for (int r = 0; r < scheme.rows; ++r) {
    for (int c = 0; c < scheme.cols; ++c) {
      Rect core;
      core.x = c * tile_w;
      core.y = r * tile_h;
      core.width = c + 1 == scheme.cols ? frame_w - core.x : tile_w;
      core.height = r + 1 == scheme.rows ? frame_h - core.y : tile_h;
      const int x0 = std::max(0, core.x - scheme.overlap);
      const int y0 = std::max(0, core.y - scheme.overlap);
      const int x1 = std::min(frame_w, core.right() + scheme.overlap);
      const int y1 = std::min(frame_h, core.bottom() + scheme.overlap);
      out.push_back(RegionGeometry{Rect{x0, y0, x1 - x0, y1 - y0}, core});
    }
  }
  return out;
}

LabelMap stitch(std::span<const RegionGeometry> geoms, std::span<const LabelMap> maps) {
  if (geoms.empty()) throw CompletenessError("stitch: no regions");
  if (geoms.size() != maps.size()) {
    throw CompletenessError("stitch: " + std::to_string(maps.size()) + " label maps for " +
                            std::to_string(geoms.size()) + " regions");
  }
  int frame_w = 0;
  int frame_h = 0;
  int num_classes = 1;
  for (std::size_t i = 0; i < geoms.size(); ++i) {
    const RegionGeometry& g = geoms[i];
    if (maps[i].width() != g.region.width || maps[i].height() != g.region.height) {
      throw ShapeError("stitch: label map size does not match region " + std::to_string(i));
    }
    if (!g.region.contains(g.core)) throw ShapeError("stitch: core outside region");
    frame_w = std::max(frame_w, g.core.right());
    frame_h = std::max(frame_h, g.core.bottom());
    num_classes = std::max(num_classes, maps[i].num_classes());
  }
  Grid<Label> out(frame_w, frame_h, 1, Label{0});
  Grid<unsigned char> owned(frame_w, frame_h, 1, 0);
  for (std::size_t i = 0; i < geoms.size(); ++i) {
    const Rect& core = geoms[i].core;
    const Rect& reg = geoms[i].region;
    for (int y = core.y; y < core.bottom(); ++y) {
      for (int x = core.x; x < core.right(); ++x) {
        if (owned.at(x, y)++) throw CompletenessError("stitch: overlapping core rectangles");
        out.at(x, y) = maps[i].at(x - reg.x, y - reg.y);
      }
    }
  }
  for (unsigned char o : owned.data()) {
    if (!o) throw CompletenessError("stitch: core rectangles leave a gap (missing region)");
  }
  return LabelMap(std::move(out), num_classes);
}

long region_pixel_total(std::span<const RegionGeometry> geoms) {
  long total = 0;
  for (const auto& g : geoms) total += g.region.area();
  return total;
}

}  // namespace dvs
