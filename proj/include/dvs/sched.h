#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "dvs/core.h"
#include "dvs/dn.h"
#include "dvs/metrics.h"

namespace dvs {

enum class Decision { kSeg, kWarp };

std::string_view to_string(Decision d);

// Segment every `period` frames regardless of content.
struct FixedPolicy {
  int period = 1;
};

// Warp iff the decision network's expected confidence score exceeds the
// threshold.
struct ConfidencePolicy {
  double threshold = 0.9;
  std::shared_ptr<const Regressor> dn;
};

// Segment iff the frame difference to the key exceeds the threshold.
struct FrameDiffPolicy {
  double threshold = 0.02;
  DiffNorm norm = DiffNorm::kAbsolute;
};

// Segment iff the mean flow magnitude exceeds the threshold (pixels).
struct FlowMagPolicy {
  double threshold = 2.0;
};

// Test-only upper bound: thresholds the true confidence score, which needs
// both paths to run. Never a deployable policy.
struct OracleConfidencePolicy {
  double threshold = 0.9;
};

using Policy = std::variant<FixedPolicy, ConfidencePolicy, FrameDiffPolicy, FlowMagPolicy,
                            OracleConfidencePolicy>;

std::string policy_name(const Policy& p);
// The policy's tunable parameter (t, l, d or f) and its value.
std::string policy_parameter(const Policy& p);
double policy_value(const Policy& p);
void validate(const Policy& p);

// Labels produced by one of the two paths, tagged with the path.
struct PathOutput {
  Decision path = Decision::kSeg;
  LabelMap labels;
};

// Scheduler memory for one region.
class RegionState {
 public:
  RegionState() = default;

  // First frame of a region: always segmented.
  static RegionState cold_start(Image cur_img, LabelMap seg_output, int frame);

  bool initialized() const noexcept { return initialized_; }
  const Image& key_image() const;
  const LabelMap& key_seg() const;
  int key_frame() const;
  int age() const noexcept { return age_; }
  Decision last_decision() const noexcept { return last_; }

 private:
  friend RegionState apply_decision(const RegionState&, Decision, const Image&,
                                    const PathOutput&, int);
  Image key_image_;
  LabelMap key_seg_;
  int key_frame_ = -1;
  int age_ = 0;
  Decision last_ = Decision::kSeg;
  bool initialized_ = false;
};

struct DecisionResult {
  Decision decision = Decision::kSeg;
  double score = 0.0;  // metric the policy thresholded (age+1 for Fixed)
};

// Extra inputs that only some policies consume.
struct DecisionContext {
  std::optional<double> true_confidence;  // OracleConfidencePolicy only
};

// Pure: never mutates state.
DecisionResult decide(const Policy& policy, const RegionState& state, const Image& cur_img,
                      const FlowField& flow, const DecisionContext& ctx = {});

// Seg: the current frame becomes the key and age resets. Warp: key kept,
// age + 1. `frame` is the current frame index.
RegionState apply_decision(const RegionState& state, Decision decision, const Image& cur_img,
                           const PathOutput& output, int frame);

}  // namespace dvs
