#include "dvs/sched.h"

#include <cmath>

namespace dvs {

std::string_view to_string(Decision d) { return d == Decision::kSeg ? "seg" : "warp"; }

namespace {
template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;
}  // namespace

std::string policy_name(const Policy& p) {
  return std::visit(Overloaded{
                        [](const FixedPolicy&) { return std::string("fixed"); },
                        [](const ConfidencePolicy&) { return std::string("confidence"); },
                        [](const FrameDiffPolicy&) { return std::string("framediff"); },
                        [](const FlowMagPolicy&) { return std::string("flowmag"); },
                        [](const OracleConfidencePolicy&) { return std::string("oracle"); },
                    },
                    p);
}

std::string policy_parameter(const Policy& p) {
  return std::visit(Overloaded{
                        [](const FixedPolicy&) { return std::string("l"); },
                        [](const ConfidencePolicy&) { return std::string("t"); },
                        [](const FrameDiffPolicy&) { return std::string("d"); },
                        [](const FlowMagPolicy&) { return std::string("f"); },
                        [](const OracleConfidencePolicy&) { return std::string("t"); },
                    },
                    p);
}

double policy_value(const Policy& p) {
  return std::visit(Overloaded{
                        [](const FixedPolicy& f) { return static_cast<double>(f.period); },
                        [](const ConfidencePolicy& c) { return c.threshold; },
                        [](const FrameDiffPolicy& d) { return d.threshold; },
                        [](const FlowMagPolicy& f) { return f.threshold; },
                        [](const OracleConfidencePolicy& o) { return o.threshold; },
                    },
                    p);
}

void validate(const Policy& p) {
  std::visit(Overloaded{
                 [](const FixedPolicy& f) {
                   if (f.period < 1) throw ConfigError("fixed period l must be >= 1");
                 },
                 [](const ConfidencePolicy& c) {
                   if (!(c.threshold >= 0.0 && c.threshold <= 1.0)) {
                     throw ConfigError("confidence threshold t must be in [0, 1]");
                   }
                   if (!c.dn) throw ConfigError("confidence policy needs a DN checkpoint");
                   if (c.dn->input_dim() != kFeatureDim) {
                     throw ConfigError("DN input width does not match the feature vector");
                   }
                 },
                 [](const FrameDiffPolicy& d) {
                   if (!(d.threshold >= 0.0) || !std::isfinite(d.threshold)) {
                     throw ConfigError("frame difference threshold d must be >= 0");
                   }
                 },
                 [](const FlowMagPolicy& f) {
                   if (!(f.threshold >= 0.0) || !std::isfinite(f.threshold)) {
                     throw ConfigError("flow magnitude threshold f must be >= 0");
                   }
                 },
                 [](const OracleConfidencePolicy& o) {
                   if (!(o.threshold >= 0.0 && o.threshold <= 1.0)) {
                     throw ConfigError("oracle threshold t must be in [0, 1]");
                   }
                 },
             },
             p);
}

RegionState RegionState::cold_start(Image cur_img, LabelMap seg_output, int frame) {
  require_same_size(cur_img.width(), cur_img.height(), seg_output.width(), seg_output.height(),
                    "cold_start");
  RegionState s;
  s.key_image_ = std::move(cur_img);
  s.key_seg_ = std::move(seg_output);
  s.key_frame_ = frame;
  s.age_ = 0;
  s.last_ = Decision::kSeg;
  s.initialized_ = true;
  return s;
}

const Image& RegionState::key_image() const {
  if (!initialized_) throw LifecycleError("region state used before its first key frame");
  return key_image_;
}

const LabelMap& RegionState::key_seg() const {
  if (!initialized_) throw LifecycleError("region state used before its first key frame");
  return key_seg_;
}

int RegionState::key_frame() const {
  if (!initialized_) throw LifecycleError("region state used before its first key frame");
  return key_frame_;
}

DecisionResult decide(const Policy& policy, const RegionState& state, const Image& cur_img,
                      const FlowField& flow, const DecisionContext& ctx) {
  if (!state.initialized()) {
    throw LifecycleError("decide called on an uninitialized region (first frame must be Seg)");
  }
  return std::visit(
      Overloaded{
          [&](const FixedPolicy& f) {
            const int due = state.age() + 1;
            return DecisionResult{due >= f.period ? Decision::kSeg : Decision::kWarp,
                                  static_cast<double>(due)};
          },
          [&](const ConfidencePolicy& c) {
            if (!c.dn) throw ConfigError("confidence policy needs a DN checkpoint");
            const FeatureVector x = extract_features(state.key_image(), cur_img, flow, state.age());
            const double expected = c.dn->predict(x);
            // Strictly "higher than" the threshold warps; equality segments.
            return DecisionResult{expected > c.threshold ? Decision::kWarp : Decision::kSeg,
                                  expected};
          },
          [&](const FrameDiffPolicy& d) {
            const double diff = frame_difference(state.key_image(), cur_img, d.norm);
            return DecisionResult{diff > d.threshold ? Decision::kSeg : Decision::kWarp, diff};
          },
          [&](const FlowMagPolicy& f) {
            const double mag = flow_magnitude(flow);
            return DecisionResult{mag > f.threshold ? Decision::kSeg : Decision::kWarp, mag};
          },
          [&](const OracleConfidencePolicy& o) {
            if (!ctx.true_confidence) {
              throw LifecycleError("oracle policy needs the true confidence score");
            }
            const double score = *ctx.true_confidence;
            return DecisionResult{score > o.threshold ? Decision::kWarp : Decision::kSeg, score};
          },
      },
      policy);
}

RegionState apply_decision(const RegionState& state, Decision decision, const Image& cur_img,
                           const PathOutput& output, int frame) {
  if (!state.initialized()) throw LifecycleError("apply_decision on an uninitialized region");
  if (output.path != decision) {
    throw LifecycleError(std::string("apply_decision: ") + std::string(to_string(decision)) +
                         " decision given " + std::string(to_string(output.path)) + " output");
  }
  if (frame <= state.key_frame_) throw LifecycleError("apply_decision: frame did not advance");
  RegionState next = state;
  next.last_ = decision;
  if (decision == Decision::kSeg) {
    require_same_size(cur_img.width(), cur_img.height(), output.labels.width(),
                      output.labels.height(), "apply_decision");
    next.key_image_ = cur_img;
    next.key_seg_ = output.labels;
    next.key_frame_ = frame;
    next.age_ = 0;
  } else {
    next.age_ = state.age_ + 1;
  }
  return next;
}

}  // namespace dvs
