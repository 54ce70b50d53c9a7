#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dvs/metrics.h"
#include "dvs/oracle.h"
#include "dvs/region.h"
#include "dvs/sched.h"
#include "dvs/warp.h"

namespace dvs {

// Abstract per-pixel costs. A region routed Seg pays seg + flow + dn, a
// region routed Warp pays flow + dn. The cold-start frame has no key to
// warp from and pays seg only.
struct CostModel {
  double seg_cost = 10.0;
  double flow_cost = 1.0;
  double dn_cost = 0.1;

  static CostModel from(const BackendSpec& b) { return {b.seg_cost, b.flow_cost, b.dn_cost}; }
  double region_cost(long pixels, Decision d, bool cold_start = false) const;
  // Cost of segmenting a whole w x h frame once: the 1x reference.
  double baseline_frame_cost(int frame_w, int frame_h) const;
};

enum class EvalMode { kFinal, kAll };

EvalMode parse_eval_mode(std::string_view name);

struct RunConfig {
  DivisionScheme scheme = DivisionScheme::make(SchemeName::k2x2, 8);
  Policy policy = FixedPolicy{5};
  BackendSpec backends;
  WarpConfig warp;
  EvalMode eval = EvalMode::kFinal;
  // Build key->current flow by composing frame-to-frame fields instead of
  // asking for it directly.
  bool chain_flow = false;
  // Run both paths on every region and log the true confidence score.
  bool record_true_score = false;
  int workers = 1;
  std::uint64_t seed = 1;
};

struct DecisionRecord {
  int frame = 0;
  int region = 0;
  Decision decision = Decision::kSeg;
  bool cold_start = false;
  bool has_true_score = false;
  double score = 0.0;       // the value the policy thresholded
  double true_score = 0.0;  // only with record_true_score
  double region_cost = 0.0;
  double frame_cost = 0.0;
};

struct TradeoffPoint {
  std::string policy;
  std::string parameter;
  double value = 0.0;
  std::string division;
  int overlap = 0;
  double miou = 0.0;
  double speedup = 0.0;
  double warp_seg_ratio = 0.0;
  double seg_fraction = 0.0;  // share of region decisions routed Seg
  double mean_key_update_period = 0.0;
  double workload_reduction = 0.0;
};

// Raw tallies from which a TradeoffPoint is derived. Adding two runs'
// tallies pools them.
struct RunCounters {
  long frames = 0;
  long decisions = 0;
  long seg_decisions = 0;
  long warp_decisions = 0;
  long seg_pixels = 0;
  long all_seg_pixels = 0;  // frames x pixels of every region
  double total_cost = 0.0;
  double baseline_cost = 0.0;  // frames x whole-frame segmentation

  RunCounters& operator+=(const RunCounters& o);
};

struct RunReport {
  TradeoffPoint point;
  std::vector<DecisionRecord> log;
  ConfusionMatrix confusion{1};
  RunCounters counters;
};

RunReport run_sequence(std::span<const FrameBundle> bundles, const RunConfig& config);

// 1 - seg-path pixels / pixels of an all-Seg run.
double workload_reduction(const RunReport& report);

// Pools several runs of one configuration (confusions merged, costs summed).
TradeoffPoint summarize(std::span<const RunReport> reports);

// One point per value; sequence s always runs with seed base.seed + s so
// every value sees the same noise. Axes: t, l, d, f, division, overlap.
// The policy axes must match the base policy's parameter.
std::vector<TradeoffPoint> sweep(std::string_view axis, std::span<const std::string> values,
                                 const RunConfig& base,
                                 std::span<const std::vector<FrameBundle>> sequences);

// Returns `base` with the named axis set to `value`.
RunConfig with_axis(const RunConfig& base, std::string_view axis, std::string_view value);

struct ScoreSeries {
  std::string name;  // "frame" for the undivided frame, else "r<i>"
  std::vector<double> raw;
  std::vector<double> smoothed;
};

struct ScoreTrace {
  std::vector<int> frames;  // frame index of each sample
  std::vector<ScoreSeries> series;
};

// Confidence score of the warp path against the seg path, per region of
// `scheme` and for the undivided frame, with keys refreshed every `period`
// frames. Smoothing is a trailing mean over `window` samples.
ScoreTrace region_score_trace(std::span<const FrameBundle> bundles, const DivisionScheme& scheme,
                              const BackendSpec& backends, int period, std::uint64_t seed,
                              int window = 15);

void write_points_csv(std::ostream& out, std::span<const TradeoffPoint> points);
void write_log_csv(std::ostream& out, const RunReport& report);
void write_trace_csv(std::ostream& out, const ScoreTrace& trace);

// Shortest round-trip decimal form.
std::string format_number(double v);

}  // namespace dvs
