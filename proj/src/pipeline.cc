#include "dvs/pipeline.h"

#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

namespace dvs {

double CostModel::region_cost(long pixels, Decision d, bool cold_start) const {
  if (cold_start) return static_cast<double>(pixels) * seg_cost;
  const double per_pixel = flow_cost + dn_cost + (d == Decision::kSeg ? seg_cost : 0.0);
  return static_cast<double>(pixels) * per_pixel;
}

double CostModel::baseline_frame_cost(int frame_w, int frame_h) const {
  return static_cast<double>(frame_w) * frame_h * seg_cost;
}

EvalMode parse_eval_mode(std::string_view name) {
  if (name == "final") return EvalMode::kFinal;
  if (name == "all") return EvalMode::kAll;
  throw ConfigError("eval mode must be final or all, got '" + std::string(name) + "'");
}

RunCounters& RunCounters::operator+=(const RunCounters& o) {
  frames += o.frames;
  decisions += o.decisions;
  seg_decisions += o.seg_decisions;
  warp_decisions += o.warp_decisions;
  seg_pixels += o.seg_pixels;
  all_seg_pixels += o.all_seg_pixels;
  total_cost += o.total_cost;
  baseline_cost += o.baseline_cost;
  return *this;
}

namespace {

// Runs fn(i) for i in [0, n) on up to `workers` threads.
template <typename Fn>
void parallel_for(int n, int workers, Fn&& fn) {
  const int threads = std::max(1, std::min(workers, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto body = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads - 1);
  for (int t = 1; t < threads; ++t) pool.emplace_back(body);
  body();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

TradeoffPoint make_point(const RunConfig& cfg, const RunCounters& c, const ConfusionMatrix& cm) {
  TradeoffPoint p;
  p.policy = policy_name(cfg.policy);
  p.parameter = policy_parameter(cfg.policy);
  p.value = policy_value(cfg.policy);
  p.division = cfg.scheme.label();
  p.overlap = cfg.scheme.overlap;
  p.miou = miou(cm);
  p.speedup = c.baseline_cost / c.total_cost;
  p.warp_seg_ratio =
      static_cast<double>(c.warp_decisions) / static_cast<double>(c.seg_decisions);
  p.seg_fraction = static_cast<double>(c.seg_decisions) / static_cast<double>(c.decisions);
  p.mean_key_update_period =
      static_cast<double>(c.decisions) / static_cast<double>(c.seg_decisions);
  p.workload_reduction =
      1.0 - static_cast<double>(c.seg_pixels) / static_cast<double>(c.all_seg_pixels);
  return p;
}

struct RegionSlot {
  RegionState state;
  FlowField chained;  // key -> previous frame, chain mode only
  bool has_chain = false;
  LabelMap output;
  DecisionRecord record;
};

}  // namespace

RunReport run_sequence(std::span<const FrameBundle> bundles, const RunConfig& cfg) {
  if (bundles.size() < 2) throw SequenceError("run_sequence needs at least 2 frames");
  validate(cfg.policy);
  cfg.backends.validate();
  if (cfg.workers < 1) throw ConfigError("workers must be >= 1");

  const int w = bundles.front().image.width();
  const int h = bundles.front().image.height();
  const int num_classes = bundles.front().truth_labels.num_classes();
  for (const FrameBundle& b : bundles) {
    require_same_size(w, h, b.image.width(), b.image.height(), "run_sequence frames");
    require_same_size(w, h, b.truth_labels.width(), b.truth_labels.height(),
                      "run_sequence truth");
  }

  const std::vector<RegionGeometry> geoms = make_regions(cfg.scheme, w, h);
  const int nregions = static_cast<int>(geoms.size());
  const int nframes = static_cast<int>(bundles.size());
  const CostModel cost = CostModel::from(cfg.backends);
  const bool oracle = std::holds_alternative<OracleConfidencePolicy>(cfg.policy);
  const bool both_paths = oracle || cfg.record_true_score;

  RunReport report;
  report.confusion = ConfusionMatrix(num_classes);
  report.log.reserve(static_cast<std::size_t>(nframes) * nregions);
  std::vector<RegionSlot> slots(nregions);
  std::vector<LabelMap> outputs(nregions);

  for (int f = 0; f < nframes; ++f) {
    const FrameBundle& bundle = bundles[f];
    parallel_for(nregions, cfg.workers, [&](int r) {
      RegionSlot& slot = slots[r];
      const RegionGeometry& geom = geoms[r];
      const Image cur = crop(bundle.image, geom);
      const long pixels = geom.region.area();
      const PixelNoise seg_noise =
          PixelNoise(derive_key(cfg.seed, StreamTag::kSegOracle, {static_cast<std::uint64_t>(f)}))
              .offset(geom.region.x, geom.region.y);
      auto run_seg = [&] {
        return seg_oracle(cur, crop(bundle.truth_labels, geom), cfg.backends, seg_noise);
      };
      DecisionRecord rec;
      rec.frame = f;
      rec.region = r;

      if (f == 0) {
        LabelMap seg = run_seg();
        slot.state = RegionState::cold_start(cur, seg, 0);
        slot.output = std::move(seg);
        slot.has_chain = false;
        rec.decision = Decision::kSeg;
        rec.cold_start = true;
        rec.region_cost = cost.region_cost(pixels, Decision::kSeg, true);
        slot.record = rec;
        return;
      }

      // Flow noise is drawn per (source, target) frame pair.
      auto flow_noise = [&](int from) {
        return PixelNoise(derive_key(cfg.seed, StreamTag::kFlowOracle,
                                     {static_cast<std::uint64_t>(from),
                                      static_cast<std::uint64_t>(f)}));
      };
      const int key = slot.state.key_frame();
      FlowField flow;
      if (cfg.chain_flow) {
        FlowField step = flow_oracle(f - 1, f, bundles, geom, cfg.backends, flow_noise(f - 1));
        flow = slot.has_chain ? compose_flows(slot.chained, step) : std::move(step);
      } else {
        flow = flow_oracle(key, f, bundles, geom, cfg.backends, flow_noise(key));
      }

      std::optional<LabelMap> seg_out;
      std::optional<LabelMap> warp_out;
      DecisionContext ctx;
      if (both_paths) {
        seg_out = run_seg();
        warp_out = warp_labels(slot.state.key_seg(), flow, cfg.warp);
        ctx.true_confidence = confidence_score(*warp_out, *seg_out);
        rec.true_score = *ctx.true_confidence;
        rec.has_true_score = true;
      }
      const DecisionResult res = decide(cfg.policy, slot.state, cur, flow, ctx);
      PathOutput out;
      out.path = res.decision;
      if (res.decision == Decision::kSeg) {
        out.labels = seg_out ? std::move(*seg_out) : run_seg();
      } else {
        out.labels = warp_out ? std::move(*warp_out)
                              : warp_labels(slot.state.key_seg(), flow, cfg.warp);
      }
      slot.state = apply_decision(slot.state, res.decision, cur, out, f);
      slot.output = std::move(out.labels);
      if (res.decision == Decision::kSeg) {
        slot.has_chain = false;
        slot.chained = FlowField();
      } else if (cfg.chain_flow) {
        slot.chained = std::move(flow);
        slot.has_chain = true;
      }
      rec.decision = res.decision;
      rec.score = res.score;
      // Oracle routing runs the seg path on every region.
      rec.region_cost = cost.region_cost(pixels, oracle ? Decision::kSeg : res.decision);
      slot.record = rec;
    });

    double frame_cost = 0.0;
    for (const RegionSlot& slot : slots) frame_cost += slot.record.region_cost;
    RunCounters& c = report.counters;
    c.frames += 1;
    c.total_cost += frame_cost;
    c.baseline_cost += cost.baseline_frame_cost(w, h);
    for (int r = 0; r < nregions; ++r) {
      DecisionRecord rec = slots[r].record;
      rec.frame_cost = frame_cost;
      const long pixels = geoms[r].region.area();
      c.decisions += 1;
      c.all_seg_pixels += pixels;
      if (rec.decision == Decision::kSeg) {
        c.seg_decisions += 1;
        c.seg_pixels += pixels;
      } else {
        c.warp_decisions += 1;
      }
      report.log.push_back(rec);
    }

    const bool evaluate = cfg.eval == EvalMode::kAll || f == nframes - 1;
    if (evaluate) {
      for (int r = 0; r < nregions; ++r) outputs[r] = slots[r].output;
      report.confusion.accumulate(bundle.truth_labels, stitch(geoms, outputs));
    }
  }

  report.point = make_point(cfg, report.counters, report.confusion);
  return report;
}

double workload_reduction(const RunReport& report) {
  const RunCounters& c = report.counters;
  return 1.0 - static_cast<double>(c.seg_pixels) / static_cast<double>(c.all_seg_pixels);
}

TradeoffPoint summarize(std::span<const RunReport> reports) {
  if (reports.empty()) throw ValueError("summarize needs at least one report");
  RunCounters c;
  ConfusionMatrix cm(reports.front().confusion.num_classes());
  for (const RunReport& r : reports) {
    c += r.counters;
    cm.merge(r.confusion);
  }
  TradeoffPoint p = reports.front().point;
  const TradeoffPoint pooled = [&] {
    RunConfig dummy;
    return make_point(dummy, c, cm);
  }();
  p.miou = pooled.miou;
  p.speedup = pooled.speedup;
  p.warp_seg_ratio = pooled.warp_seg_ratio;
  p.seg_fraction = pooled.seg_fraction;
  p.mean_key_update_period = pooled.mean_key_update_period;
  p.workload_reduction = pooled.workload_reduction;
  return p;
}

namespace {

double parse_value(std::string_view axis, std::string_view v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError("sweep value '" + std::string(v) + "' for axis " + std::string(axis) +
                      " is not a number");
  }
  return out;
}

}  // namespace

RunConfig with_axis(const RunConfig& base, std::string_view axis, std::string_view value) {
  RunConfig cfg = base;
  if (axis == "division") {
    cfg.scheme = DivisionScheme::parse(value, base.scheme.overlap);
    return cfg;
  }
  const double x = parse_value(axis, value);
  if (axis == "overlap") {
    if (x < 0 || x != std::floor(x)) throw ConfigError("overlap must be a non-negative integer");
    cfg.scheme.overlap = static_cast<int>(x);
    return cfg;
  }
  if (axis != "t" && axis != "l" && axis != "d" && axis != "f") {
    throw ConfigError("unknown sweep axis '" + std::string(axis) + "'");
  }
  if (policy_parameter(base.policy) != axis) {
    throw ConfigError("sweep axis " + std::string(axis) + " does not apply to the " +
                      policy_name(base.policy) + " policy");
  }
  std::visit(
      [&](auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, FixedPolicy>) {
          if (x != std::floor(x)) throw ConfigError("l must be an integer");
          p.period = static_cast<int>(x);
        } else {
          p.threshold = x;
        }
      },
      cfg.policy);
  validate(cfg.policy);
  return cfg;
}

std::vector<TradeoffPoint> sweep(std::string_view axis, std::span<const std::string> values,
                                 const RunConfig& base,
                                 std::span<const std::vector<FrameBundle>> sequences) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  if (sequences.empty()) throw ConfigError("sweep needs at least one sequence");
  std::vector<RunConfig> configs;
  for (const std::string& v : values) configs.push_back(with_axis(base, axis, v));

  std::vector<TradeoffPoint> points;
  for (const RunConfig& cfg : configs) {
    std::vector<RunReport> reports;
    for (std::size_t s = 0; s < sequences.size(); ++s) {
      RunConfig run = cfg;
      run.seed = base.seed + s;
      reports.push_back(run_sequence(sequences[s], run));
    }
    points.push_back(summarize(reports));
  }
  return points;
}

ScoreTrace region_score_trace(std::span<const FrameBundle> bundles, const DivisionScheme& scheme,
                              const BackendSpec& backends, int period, std::uint64_t seed,
                              int window) {
  if (window < 1) throw ConfigError("smoothing window must be >= 1");
  RunConfig cfg;
  cfg.policy = FixedPolicy{period};
  cfg.backends = backends;
  cfg.record_true_score = true;
  cfg.seed = seed;

  ScoreTrace trace;
  for (std::size_t f = 1; f < bundles.size(); ++f) trace.frames.push_back(static_cast<int>(f));

  auto collect = [&](const DivisionScheme& sch, bool whole) {
    cfg.scheme = sch;
    const RunReport rep = run_sequence(bundles, cfg);
    const int nreg = sch.region_count();
    for (int r = 0; r < nreg; ++r) {
      ScoreSeries s;
      s.name = whole ? "frame" : "r" + std::to_string(r);
      for (const DecisionRecord& rec : rep.log) {
        if (rec.region == r && !rec.cold_start) s.raw.push_back(rec.true_score);
      }
      double sum = 0.0;
      for (std::size_t i = 0; i < s.raw.size(); ++i) {
        sum += s.raw[i];
        if (i >= static_cast<std::size_t>(window)) sum -= s.raw[i - window];
        const std::size_t n = std::min<std::size_t>(i + 1, window);
        s.smoothed.push_back(sum / static_cast<double>(n));
      }
      trace.series.push_back(std::move(s));
    }
  };
  collect(DivisionScheme::make(SchemeName::kOriginal, 0), true);
  collect(scheme, false);
  return trace;
}

std::string format_number(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return ec == std::errc() ? std::string(buf, p) : std::string("nan");
}

void write_points_csv(std::ostream& out, std::span<const TradeoffPoint> points) {
  out << "policy,parameter,value,division,overlap,miou,speedup,warp_seg_ratio,seg_fraction,"
         "mean_key_update_period,workload_reduction\n";
  for (const TradeoffPoint& p : points) {
    out << p.policy << ',' << p.parameter << ',' << format_number(p.value) << ',' << p.division
        << ',' << p.overlap << ',' << format_number(p.miou) << ',' << format_number(p.speedup)
        << ',' << format_number(p.warp_seg_ratio) << ',' << format_number(p.seg_fraction) << ','
        << format_number(p.mean_key_update_period) << ','
        << format_number(p.workload_reduction) << '\n';
  }
}

void write_log_csv(std::ostream& out, const RunReport& report) {
  out << "frame,region,decision,score,true_score,region_cost,frame_cost\n";
  for (const DecisionRecord& r : report.log) {
    out << r.frame << ',' << r.region << ',' << to_string(r.decision) << ',';
    if (!r.cold_start) out << format_number(r.score);
    out << ',';
    if (r.has_true_score) out << format_number(r.true_score);
    out << ',' << format_number(r.region_cost) << ',' << format_number(r.frame_cost) << '\n';
  }
}

void write_trace_csv(std::ostream& out, const ScoreTrace& trace) {
  out << "frame,series,raw,smoothed\n";
  for (const ScoreSeries& s : trace.series) {
    for (std::size_t i = 0; i < s.raw.size(); ++i) {
      out << trace.frames[i] << ',' << s.name << ',' << format_number(s.raw[i]) << ','
          << format_number(s.smoothed[i]) << '\n';
    }
  }
}

}  // namespace dvs
