#pragma once

#include <string_view>

#include "dvs/core.h"

namespace dvs {

struct WarpConfig {
  enum class Sampling { kNearestLabel, kOneHotBilinearArgmax };
  enum class OutOfBounds { kClamp, kKeepSource };

  Sampling sampling = Sampling::kNearestLabel;
  OutOfBounds out_of_bounds = OutOfBounds::kClamp;

  // nearest|bilinear
  static Sampling parse_sampling(std::string_view name);
};

// Backward warp of the key segmentation: output pixel (x, y) samples
// key_seg at (x - u, y - v). A source position is out of frame when it
// falls outside the pixel extent [-0.5, w - 0.5) x [-0.5, h - 0.5).
// One-hot argmax ties go to the smallest class id.
LabelMap warp_labels(const LabelMap& key_seg, const FlowField& flow, const WarpConfig& cfg = {});

// Backward bilinear warp of intensities, border samples replicated.
Image warp_image(const Image& key_img, const FlowField& flow);

// Flow from frame k to frame i given k->j and j->i fields (backward
// convention): out(p) = second(p) + first(p - second(p)), with `first`
// sampled bilinearly and clamped at the border.
FlowField compose_flows(const FlowField& first, const FlowField& second);

}  // namespace dvs
