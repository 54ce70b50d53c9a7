#include <gtest/gtest.h>

#include <memory>
#include <sstream>

#include "dvs/pipeline.h"
#include "fixtures.h"

namespace dvs {
namespace {

// 2x2 with overlap 8 on a 128x128 frame: four 72x72 regions.
constexpr double kRegionPixels = 4.0 * 72 * 72;
constexpr double kBaseline = 20.0 * 128 * 128 * 10.0;

const std::vector<FrameBundle>& heterogeneous() {
  static const auto frames = render_sequence(make_scene(ScenePreset::kHeterogeneous, 1));
  return frames;
}

const std::vector<FrameBundle>& still() {
  static const auto frames = render_sequence(make_scene(ScenePreset::kStatic, 1));
  return frames;
}

RunConfig noise_free(Policy p) {
  RunConfig c;
  c.policy = std::move(p);
  c.backends = BackendSpec::noise_free();
  return c;
}

std::shared_ptr<const Regressor> constant_dn() {
  auto r = std::make_shared<Regressor>(Regressor::initialized({kFeatureDim, 1}, 1));
  for (double& w : r->params()) w = 0.0;
  return r;
}

TEST(CostModel, PerPathCharges) {
  const CostModel m;
  EXPECT_DOUBLE_EQ(m.region_cost(100, Decision::kSeg), 100 * 11.1);
  EXPECT_DOUBLE_EQ(m.region_cost(100, Decision::kWarp), 100 * 1.1);
  EXPECT_DOUBLE_EQ(m.region_cost(100, Decision::kSeg, true), 1000.0);
  EXPECT_DOUBLE_EQ(m.baseline_frame_cost(4, 5), 200.0);
}

TEST(EvalMode, Parses) {
  EXPECT_EQ(parse_eval_mode("final"), EvalMode::kFinal);
  EXPECT_EQ(parse_eval_mode("all"), EvalMode::kAll);
  EXPECT_THROW(parse_eval_mode("some"), ConfigError);
}

TEST(Run, FixedOneNoiseFreeIsExactButSlower) {
  const RunReport r = run_sequence(heterogeneous(), noise_free(FixedPolicy{1}));
  EXPECT_EQ(r.point.miou, 1.0);
  const double cost = kRegionPixels * (10.0 + 19 * 11.1);
  EXPECT_NEAR(r.point.speedup, kBaseline / cost, 1e-12);
  EXPECT_LT(r.point.speedup, 1.0);
  EXPECT_EQ(r.point.seg_fraction, 1.0);
  EXPECT_EQ(r.point.warp_seg_ratio, 0.0);
  EXPECT_EQ(workload_reduction(r), 0.0);
}

TEST(Run, FixedFiveMatchesHandCost) {
  const RunReport r = run_sequence(heterogeneous(), noise_free(FixedPolicy{5}));
  // Keys at frames 0, 5, 10, 15 in every region.
  const double cost = kRegionPixels * (10.0 + 3 * 11.1 + 16 * 1.1);
  EXPECT_NEAR(r.point.speedup, kBaseline / cost, 1e-12);
  EXPECT_EQ(r.point.warp_seg_ratio, 4.0);
  EXPECT_EQ(r.point.seg_fraction, 0.2);
  EXPECT_EQ(r.point.mean_key_update_period, 5.0);
  EXPECT_DOUBLE_EQ(r.point.workload_reduction, 0.8);
  EXPECT_EQ(r.point.division, "2x2");
  EXPECT_EQ(r.point.overlap, 8);
  EXPECT_EQ(r.point.parameter, "l");
  EXPECT_EQ(r.point.value, 5.0);
}

TEST(Run, StaticNoiseFreeWarpsEverything) {
  const RunReport r = run_sequence(still(), noise_free(FrameDiffPolicy{0.0}));
  EXPECT_EQ(r.point.miou, 1.0);
  EXPECT_EQ(r.counters.seg_decisions, 4);  // cold start only
  EXPECT_NEAR(r.point.workload_reduction, 19.0 / 20.0, 1e-15);
  EXPECT_NEAR(r.point.speedup, kBaseline / (kRegionPixels * (10.0 + 19 * 1.1)), 1e-12);
}

TEST(Run, ThresholdOneSegmentsEverything) {
  RunConfig c;
  c.policy = ConfidencePolicy{1.0, constant_dn()};
  const RunReport r = run_sequence(heterogeneous(), c);
  EXPECT_EQ(r.point.seg_fraction, 1.0);
  c.policy = ConfidencePolicy{0.0, constant_dn()};
  EXPECT_EQ(run_sequence(heterogeneous(), c).counters.seg_decisions, 4);
}

TEST(Run, OracleThresholdSweepApproachesAllSeg) {
  RunConfig c;
  c.policy = OracleConfidencePolicy{0.5};
  double prev = 0.0;
  for (double t : {0.5, 0.9, 0.97, 0.99, 1.0}) {
    std::get<OracleConfidencePolicy>(c.policy).threshold = t;
    const double f = run_sequence(heterogeneous(), c).point.seg_fraction;
    EXPECT_GE(f, prev) << "t=" << t;
    prev = f;
  }
  EXPECT_EQ(prev, 1.0);
}

TEST(Run, LogHasOneRecordPerRegionAndFrame) {
  RunConfig c = noise_free(FixedPolicy{3});
  c.record_true_score = true;
  const RunReport r = run_sequence(heterogeneous(), c);
  ASSERT_EQ(r.log.size(), 80u);
  double total = 0.0;
  for (std::size_t i = 0; i < r.log.size(); ++i) {
    EXPECT_EQ(r.log[i].frame, static_cast<int>(i / 4));
    EXPECT_EQ(r.log[i].region, static_cast<int>(i % 4));
    EXPECT_EQ(r.log[i].cold_start, i < 4);
    EXPECT_EQ(r.log[i].has_true_score, i >= 4);
    total += r.log[i].region_cost;
  }
  EXPECT_NEAR(total, r.counters.total_cost, 1e-6);
  // Noise free, the warp path misses exactly the disoccluded pixels.
  const auto geoms = make_regions(c.scheme, 128, 128);
  for (const auto& rec : r.log) {
    if (rec.cold_start) continue;
    const int key = 3 * ((rec.frame - 1) / 3);
    const double expected =
        1.0 - disocclusion_fraction(heterogeneous(), key, rec.frame,
                                    geoms[static_cast<std::size_t>(rec.region)].region);
    EXPECT_NEAR(rec.true_score, expected, 1e-12) << rec.frame << "/" << rec.region;
  }
}

TEST(Run, EvalAllScoresEveryFrame) {
  RunConfig c = noise_free(FixedPolicy{5});
  const RunReport fin = run_sequence(heterogeneous(), c);
  c.eval = EvalMode::kAll;
  const RunReport all = run_sequence(heterogeneous(), c);
  EXPECT_EQ(all.confusion.total(), 20 * fin.confusion.total());
  EXPECT_EQ(fin.confusion.total(), 128 * 128);
}

TEST(Run, SameResultForAnyWorkerCount) {
  RunConfig c;
  c.policy = OracleConfidencePolicy{0.95};
  c.record_true_score = true;
  std::string ref;
  for (int workers : {1, 3, 8}) {
    c.workers = workers;
    std::ostringstream os;
    write_log_csv(os, run_sequence(heterogeneous(), c));
    if (ref.empty()) ref = os.str();
    EXPECT_EQ(os.str(), ref) << "workers=" << workers;
  }
}

TEST(Run, ChainedFlowMatchesDirectOnStaticScene) {
  RunConfig c = noise_free(FixedPolicy{20});
  c.eval = EvalMode::kAll;
  const double direct = run_sequence(still(), c).point.miou;
  c.chain_flow = true;
  EXPECT_EQ(run_sequence(still(), c).point.miou, direct);
  EXPECT_EQ(direct, 1.0);
}

TEST(Run, EmptySequenceRaises) {
  EXPECT_ANY_THROW(run_sequence(std::span<const FrameBundle>{}, RunConfig{}));
}

TEST(Summarize, PoolsCounters) {
  const RunReport a = run_sequence(heterogeneous(), noise_free(FixedPolicy{1}));
  const RunReport b = run_sequence(still(), noise_free(FrameDiffPolicy{0.0}));
  const std::vector<RunReport> both = {a, b};
  const TradeoffPoint p = summarize(both);
  EXPECT_NEAR(p.seg_fraction, (80.0 + 4.0) / 160.0, 1e-15);
  EXPECT_NEAR(p.speedup, 2 * kBaseline / (a.counters.total_cost + b.counters.total_cost), 1e-12);
  EXPECT_THROW(summarize(std::span<const RunReport>{}), ValueError);
}

TEST(Sweep, AxisHandling) {
  const RunConfig base = noise_free(FixedPolicy{5});
  EXPECT_EQ(with_axis(base, "overlap", "16").scheme.overlap, 16);
  EXPECT_EQ(with_axis(base, "division", "3x3").scheme.name, SchemeName::k3x3);
  EXPECT_EQ(with_axis(base, "division", "3x3").scheme.overlap, 8);
  EXPECT_EQ(std::get<FixedPolicy>(with_axis(base, "l", "7").policy).period, 7);
  EXPECT_THROW(with_axis(base, "t", "0.5"), ConfigError);
  EXPECT_THROW(with_axis(base, "l", "2.5"), ConfigError);
  EXPECT_THROW(with_axis(base, "overlap", "-1"), ConfigError);
  EXPECT_THROW(with_axis(base, "speed", "1"), ConfigError);
  EXPECT_THROW(with_axis(base, "l", "abc"), ConfigError);
}

TEST(Sweep, OnePointPerValueMatchingSingleRuns) {
  RunConfig base;
  base.policy = FixedPolicy{1};
  base.seed = 10;
  const std::vector<std::vector<FrameBundle>> seqs = {heterogeneous(), still()};
  const std::vector<std::string> values = {"1", "4"};
  const auto points = sweep("l", values, base, seqs);
  ASSERT_EQ(points.size(), 2u);
  RunConfig one = base;
  one.policy = FixedPolicy{4};
  one.seed = 10;
  const RunReport r0 = run_sequence(seqs[0], one);
  one.seed = 11;
  const RunReport r1 = run_sequence(seqs[1], one);
  const std::vector<RunReport> pair = {r0, r1};
  EXPECT_EQ(points[1].miou, summarize(pair).miou);
  EXPECT_EQ(points[1].value, 4.0);
  EXPECT_GT(points[1].speedup, points[0].speedup);
}

TEST(Trace, NoiseFreeStaticSceneScoresOne) {
  const ScoreTrace t = region_score_trace(still(), DivisionScheme::make(SchemeName::k2x2, 8),
                                          BackendSpec::noise_free(), 20, 1, 5);
  ASSERT_EQ(t.series.size(), 5u);
  EXPECT_EQ(t.series[0].name, "frame");
  EXPECT_EQ(t.series[4].name, "r3");
  for (const auto& s : t.series) {
    ASSERT_EQ(s.raw.size(), t.frames.size());
    for (double v : s.raw) EXPECT_EQ(v, 1.0);
    for (double v : s.smoothed) EXPECT_EQ(v, 1.0);
  }
}

TEST(Trace, SmoothingIsTrailingMean) {
  const ScoreTrace t = region_score_trace(heterogeneous(), DivisionScheme::make(SchemeName::k2x2),
                                          BackendSpec{}, 20, 2, 3);
  const auto& s = t.series[1];
  for (std::size_t i = 0; i < s.raw.size(); ++i) {
    const std::size_t lo = i >= 2 ? i - 2 : 0;
    double sum = 0.0;
    for (std::size_t j = lo; j <= i; ++j) sum += s.raw[j];
    EXPECT_NEAR(s.smoothed[i], sum / static_cast<double>(i - lo + 1), 1e-12);
  }
}

TEST(Csv, NumbersRoundTrip) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1.0), "1");
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Csv, PointAndLogLayout) {
  const RunReport r = run_sequence(heterogeneous(), noise_free(FixedPolicy{5}));
  std::ostringstream pts;
  write_points_csv(pts, std::span<const TradeoffPoint>(&r.point, 1));
  std::istringstream in(pts.str());
  std::string header;
  std::string row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header.substr(0, 22), "policy,parameter,value");
  EXPECT_EQ(row.substr(0, row.find(",2x2")), "fixed,l,5");
  std::ostringstream log;
  write_log_csv(log, r);
  std::istringstream lin(log.str());
  std::getline(lin, header);
  EXPECT_EQ(header, "frame,region,decision,score,true_score,region_cost,frame_cost");
  std::getline(lin, row);
  EXPECT_EQ(row.substr(0, 11), "0,0,seg,,,5");  // cold start has no score
}

}  // namespace
}  // namespace dvs
