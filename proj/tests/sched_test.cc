#include <gtest/gtest.h>

#include <memory>

#include "dvs/sched.h"
#include "fixtures.h"

namespace dvs {
namespace {

const Image kImg = Image::filled(8, 8, 3, 0.4f);
const FlowField kZero = FlowField::uniform(8, 8, 0, 0);

RegionState started() {
  return RegionState::cold_start(kImg, LabelMap::filled(8, 8, 2, 1), 0);
}

PathOutput output(Decision d, Label v = 1) { return {d, LabelMap::filled(8, 8, 2, v)}; }

// Runs `frames` decisions after the cold start and counts Seg decisions,
// including the cold start itself.
int count_segs(const Policy& p, int frames) {
  RegionState s = started();
  int segs = 1;
  for (int f = 1; f < frames; ++f) {
    const Decision d = decide(p, s, kImg, kZero).decision;
    segs += d == Decision::kSeg;
    s = apply_decision(s, d, kImg, output(d), f);
  }
  return segs;
}

std::shared_ptr<const Regressor> constant_dn() {
  auto r = std::make_shared<Regressor>(Regressor::initialized({kFeatureDim, 1}, 1));
  for (double& w : r->params()) w = 0.0;  // predicts sigmoid(0) = 0.5
  return r;
}

TEST(Fixed, PeriodOneAlwaysSegments) { EXPECT_EQ(count_segs(FixedPolicy{1}, 20), 20); }

TEST(Fixed, SegmentsCeilNOverL) {
  for (int l : {2, 3, 4, 5, 7, 19, 20, 25}) {
    EXPECT_EQ(count_segs(FixedPolicy{l}, 20), (20 + l - 1) / l) << "l=" << l;
  }
}

TEST(Fixed, ScoreIsAgePlusOne) {
  RegionState s = started();
  s = apply_decision(s, Decision::kWarp, kImg, output(Decision::kWarp), 1);
  EXPECT_EQ(decide(FixedPolicy{5}, s, kImg, kZero).score, 2.0);
}

TEST(Confidence, ThresholdZeroAlwaysWarps) {
  EXPECT_EQ(count_segs(ConfidencePolicy{0.0, constant_dn()}, 20), 1);
}

TEST(Confidence, ThresholdOneAlwaysSegments) {
  EXPECT_EQ(count_segs(ConfidencePolicy{1.0, constant_dn()}, 20), 20);
}

TEST(Confidence, EqualityRoutesToSeg) {
  const auto r = decide(ConfidencePolicy{0.5, constant_dn()}, started(), kImg, kZero);
  EXPECT_EQ(r.score, 0.5);
  EXPECT_EQ(r.decision, Decision::kSeg);
  EXPECT_EQ(decide(ConfidencePolicy{0.4999, constant_dn()}, started(), kImg, kZero).decision,
            Decision::kWarp);
}

TEST(FrameDiff, IdenticalFrameWarps) {
  const auto r = decide(FrameDiffPolicy{0.0}, started(), kImg, kZero);
  EXPECT_EQ(r.score, 0.0);
  EXPECT_EQ(r.decision, Decision::kWarp);
}

TEST(FrameDiff, ChangedFrameSegments) {
  const Image brighter = Image::filled(8, 8, 3, 0.6f);
  const auto r = decide(FrameDiffPolicy{0.1}, started(), brighter, kZero);
  EXPECT_NEAR(r.score, 0.2, 1e-6);
  EXPECT_EQ(r.decision, Decision::kSeg);
}

TEST(FlowMag, ThresholdsMeanMagnitude) {
  const FlowField f = FlowField::uniform(8, 8, 3, 4);
  EXPECT_EQ(decide(FlowMagPolicy{4.9}, started(), kImg, f).decision, Decision::kSeg);
  EXPECT_EQ(decide(FlowMagPolicy{5.0}, started(), kImg, f).decision, Decision::kWarp);
}

TEST(OracleConfidence, NeedsTrueScore) {
  EXPECT_THROW(decide(OracleConfidencePolicy{0.9}, started(), kImg, kZero), LifecycleError);
  DecisionContext ctx;
  ctx.true_confidence = 0.95;
  EXPECT_EQ(decide(OracleConfidencePolicy{0.9}, started(), kImg, kZero, ctx).decision,
            Decision::kWarp);
  ctx.true_confidence = 0.9;
  EXPECT_EQ(decide(OracleConfidencePolicy{0.9}, started(), kImg, kZero, ctx).decision,
            Decision::kSeg);
}

TEST(RegionState, UninitializedUseRaises) {
  const RegionState s;
  EXPECT_FALSE(s.initialized());
  EXPECT_THROW(s.key_image(), LifecycleError);
  EXPECT_THROW(s.key_seg(), LifecycleError);
  EXPECT_THROW(s.key_frame(), LifecycleError);
  EXPECT_THROW(decide(FixedPolicy{2}, s, kImg, kZero), LifecycleError);
  EXPECT_THROW(apply_decision(s, Decision::kSeg, kImg, output(Decision::kSeg), 1), LifecycleError);
}

TEST(RegionState, SegResetsKeyAndWarpAges) {
  RegionState s = started();
  EXPECT_EQ(s.key_frame(), 0);
  EXPECT_EQ(s.age(), 0);
  s = apply_decision(s, Decision::kWarp, kImg, output(Decision::kWarp, 0), 1);
  EXPECT_EQ(s.key_frame(), 0);
  EXPECT_EQ(s.age(), 1);
  EXPECT_EQ(s.key_seg().at(0, 0), 1);  // warp output never becomes the key
  EXPECT_EQ(s.last_decision(), Decision::kWarp);
  const Image next = Image::filled(8, 8, 3, 0.7f);
  s = apply_decision(s, Decision::kSeg, next, output(Decision::kSeg, 0), 2);
  EXPECT_EQ(s.key_frame(), 2);
  EXPECT_EQ(s.age(), 0);
  EXPECT_EQ(s.key_seg().at(0, 0), 0);
  EXPECT_EQ(s.key_image(), next);
}

TEST(RegionState, DecideDoesNotMutate) {
  const RegionState s = started();
  decide(FixedPolicy{1}, s, kImg, kZero);
  EXPECT_EQ(s.age(), 0);
  EXPECT_EQ(s.key_frame(), 0);
}

TEST(RegionState, MismatchesRaise) {
  const RegionState s = started();
  EXPECT_THROW(apply_decision(s, Decision::kSeg, kImg, output(Decision::kWarp), 1),
               LifecycleError);
  EXPECT_THROW(apply_decision(s, Decision::kSeg, kImg, output(Decision::kSeg), 0),
               LifecycleError);
}

TEST(Policy, NamesAndParameters) {
  EXPECT_EQ(policy_parameter(FixedPolicy{3}), "l");
  EXPECT_EQ(policy_value(FixedPolicy{3}), 3.0);
  EXPECT_EQ(policy_parameter(ConfidencePolicy{0.8, nullptr}), "t");
  EXPECT_EQ(policy_parameter(FrameDiffPolicy{}), "d");
  EXPECT_EQ(policy_parameter(FlowMagPolicy{}), "f");
  EXPECT_NE(policy_name(FixedPolicy{}), policy_name(FrameDiffPolicy{}));
  EXPECT_EQ(to_string(Decision::kSeg), "seg");
  EXPECT_EQ(to_string(Decision::kWarp), "warp");
}

TEST(Policy, ValidationRejectsBadParameters) {
  EXPECT_THROW(validate(FixedPolicy{0}), ConfigError);
  EXPECT_THROW(validate(ConfidencePolicy{1.1, constant_dn()}), ConfigError);
  EXPECT_THROW(validate(ConfidencePolicy{0.9, nullptr}), ConfigError);
  EXPECT_THROW(validate(FrameDiffPolicy{-0.1}), ConfigError);
  EXPECT_THROW(validate(FlowMagPolicy{-1}), ConfigError);
  EXPECT_THROW(validate(OracleConfidencePolicy{-0.5}), ConfigError);
  auto wrong = std::make_shared<Regressor>(Regressor::initialized({3, 1}, 1));
  EXPECT_THROW(validate(ConfidencePolicy{0.9, wrong}), ConfigError);
  EXPECT_NO_THROW(validate(ConfidencePolicy{0.9, constant_dn()}));
}

}  // namespace
}  // namespace dvs
