#include "cli.h"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "dvs/config.h"
#include "dvs/dn.h"
#include "dvs/grid_io.h"
#include "dvs/pipeline.h"

namespace dvs::cli {
namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string division = "2x2";
  int overlap = 8;
  std::string policy = "fixed";
  double t = 0.9;
  int l = 5;
  double d = 0.02;
  double f = 2.0;
  std::string warp = "nearest";
  std::string out;
  std::string dn;
  int workers = 1;
  std::string eval = "final";
  bool chain_flow = false;
  std::string summary;
  // sweep
  std::string axis;
  std::string values;
  int sequences = 5;
  // train-dn
  int scenes = 10;
  int epochs = 200;
  int max_gap = 0;
};

void add_scene_flags(CLI::App* app, Options& o) {
  app->add_option("--config", o.config, "experiment config file");
  app->add_option("--seed", o.seed, "overrides the config seed");
}

void add_run_flags(CLI::App* app, Options& o) {
  add_scene_flags(app, o);
  app->add_option("--division", o.division, "original|half|2x2|3x3|4x4");
  app->add_option("--overlap", o.overlap, "overlap in pixels")->check(CLI::NonNegativeNumber);
  app->add_option("--policy", o.policy, "fixed|confidence|framediff|flowmag");
  app->add_option("--t", o.t, "confidence threshold");
  app->add_option("--l", o.l, "fixed key period");
  app->add_option("--d", o.d, "frame difference threshold");
  app->add_option("--f", o.f, "flow magnitude threshold");
  app->add_option("--warp", o.warp, "nearest|bilinear");
  app->add_option("--dn", o.dn, "decision network checkpoint");
  app->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
  app->add_option("--eval", o.eval, "final|all");
  app->add_flag("--chain-flow", o.chain_flow, "compose frame-to-frame flow");
}

ExperimentConfig load(const Options& o) {
  ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  return cfg;
}

Policy make_policy(const Options& o) {
  if (o.policy == "fixed") return FixedPolicy{o.l};
  if (o.policy == "framediff") return FrameDiffPolicy{o.d};
  if (o.policy == "flowmag") return FlowMagPolicy{o.f};
  if (o.policy == "confidence") {
    if (o.dn.empty()) throw ConfigError("--policy confidence requires --dn <checkpoint>");
    return ConfidencePolicy{o.t, std::make_shared<const Regressor>(load_regressor(o.dn))};
  }
  throw ConfigError("unknown policy '" + o.policy + "'");
}

RunConfig make_run_config(const Options& o, const ExperimentConfig& exp) {
  RunConfig rc;
  rc.scheme = DivisionScheme::parse(o.division, o.overlap);
  rc.policy = make_policy(o);
  rc.backends = exp.backends;
  rc.warp.sampling = WarpConfig::parse_sampling(o.warp);
  rc.eval = parse_eval_mode(o.eval);
  rc.chain_flow = o.chain_flow;
  rc.workers = o.workers;
  rc.seed = exp.seed;
  validate(rc.policy);
  return rc;
}

// Writes to `path`, or to `fallback` when the path is empty.
template <typename Fn>
void emit(const std::string& path, std::ostream& fallback, Fn&& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open " + path + " for writing");
  write(file);
  if (!file) throw IoError("write failed: " + path);
}

std::vector<std::string> split_values(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void cmd_gen(const Options& o, std::ostream& out) {
  const ExperimentConfig exp = load(o);
  if (o.out.empty()) throw ConfigError("gen requires --out <directory>");
  const std::filesystem::path dir = o.out;
  std::filesystem::create_directories(dir);
  const std::vector<FrameBundle> bundles = render_sequence(exp.scene());
  for (const FrameBundle& b : bundles) {
    char name[32];
    std::snprintf(name, sizeof(name), "%03d", b.index);
    save(dir / (std::string("image_") + name + ".dvsg"), b.image);
    save(dir / (std::string("labels_") + name + ".dvsg"), b.truth_labels);
    if (b.index > 0) {
      save(dir / (std::string("flow_") + name + ".dvsg"), truth_flow(bundles, b.index - 1, b.index));
    }
  }
  out << "wrote " << bundles.size() << " frames to " << dir.string() << '\n';
}

void cmd_train(const Options& o, std::ostream& out) {
  const ExperimentConfig exp = load(o);
  if (o.out.empty()) throw ConfigError("train-dn requires --out <checkpoint>");
  const std::vector<SceneSpec> specs = training_scenes(o.scenes, exp.seed, exp.frame_w,
                                                       exp.frame_h, exp.sequence_length);
  std::vector<std::vector<FrameBundle>> seqs;
  for (const SceneSpec& s : specs) seqs.push_back(render_sequence(s));
  TrainingSetOptions topt;
  topt.warp.sampling = WarpConfig::parse_sampling(o.warp);
  topt.max_gap = o.max_gap;
  const std::vector<Sample> data = build_training_set(
      seqs, DivisionScheme::parse(o.division, o.overlap), exp.backends, exp.seed, topt);
  TrainParams tp;
  tp.epochs = o.epochs;
  tp.seed = exp.seed;
  const TrainResult res = train(data, tp);
  save_regressor(std::filesystem::path(o.out), res.model);
  const EpochStats& last = res.report.final();
  out << "samples " << data.size() << " (train " << res.report.train_size << ", holdout "
      << res.report.holdout_size << ")\n"
      << "holdout_mae " << format_number(last.holdout_mae) << "\n"
      << "holdout_mse " << format_number(last.holdout_mse) << "\n";
}

void cmd_run(const Options& o, std::ostream& out) {
  const ExperimentConfig exp = load(o);
  const RunConfig rc = make_run_config(o, exp);
  const std::vector<FrameBundle> bundles = render_sequence(exp.scene());
  const RunReport rep = run_sequence(bundles, rc);
  emit(o.out, out, [&](std::ostream& s) { write_log_csv(s, rep); });
  if (!o.summary.empty()) {
    emit(o.summary, out, [&](std::ostream& s) {
      write_points_csv(s, std::span<const TradeoffPoint>(&rep.point, 1));
    });
  }
}

void cmd_sweep(const Options& o, std::ostream& out) {
  const ExperimentConfig exp = load(o);
  const RunConfig rc = make_run_config(o, exp);
  const std::vector<std::string> values = split_values(o.values);
  if (values.empty()) throw ConfigError("sweep requires --values v1,v2,...");
  std::vector<std::vector<FrameBundle>> seqs;
  for (int s = 0; s < o.sequences; ++s) seqs.push_back(render_sequence(exp.scene(exp.seed + s)));
  const std::vector<TradeoffPoint> pts = sweep(o.axis, values, rc, seqs);
  emit(o.out, out, [&](std::ostream& s) { write_points_csv(s, pts); });
}

void cmd_trace(const Options& o, std::ostream& out) {
  const ExperimentConfig exp = load(o);
  const std::vector<FrameBundle> bundles = render_sequence(exp.scene());
  const ScoreTrace tr = region_score_trace(
      bundles, DivisionScheme::parse(o.division, o.overlap), exp.backends, o.l, exp.seed);
  emit(o.out, out, [&](std::ostream& s) { write_trace_csv(s, tr); });
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Region-based dynamic video segmentation on synthetic scenes", "dvs"};
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("gen", "render a scene to DVSG files");
  add_scene_flags(gen, o);
  gen->add_option("--out", o.out, "output directory");

  auto* tr = app.add_subcommand("train-dn", "train the decision network");
  add_scene_flags(tr, o);
  tr->add_option("--division", o.division, "original|half|2x2|3x3|4x4");
  tr->add_option("--overlap", o.overlap, "overlap in pixels")->check(CLI::NonNegativeNumber);
  tr->add_option("--warp", o.warp, "nearest|bilinear");
  tr->add_option("--scenes", o.scenes, "training sequences")->check(CLI::PositiveNumber);
  tr->add_option("--epochs", o.epochs, "training epochs")->check(CLI::PositiveNumber);
  tr->add_option("--max-gap", o.max_gap, "largest key-to-current gap, 0 for all");
  tr->add_option("--out", o.out, "checkpoint path");

  auto* rn = app.add_subcommand("run", "run one sequence and write the decision log");
  add_run_flags(rn, o);
  rn->add_option("--out", o.out, "decision log CSV (stdout if omitted)");
  rn->add_option("--summary", o.summary, "tradeoff point CSV");

  auto* sw = app.add_subcommand("sweep", "sweep one axis and write tradeoff points");
  add_run_flags(sw, o);
  sw->add_option("--axis", o.axis, "t|l|d|f|division|overlap")->required();
  sw->add_option("--values", o.values, "comma separated values")->required();
  sw->add_option("--sequences", o.sequences, "seeds per point")->check(CLI::PositiveNumber);
  sw->add_option("--out", o.out, "CSV path (stdout if omitted)");

  auto* tc = app.add_subcommand("trace", "per-region confidence score series");
  add_scene_flags(tc, o);
  tc->add_option("--division", o.division, "original|half|2x2|3x3|4x4");
  tc->add_option("--overlap", o.overlap, "overlap in pixels")->check(CLI::NonNegativeNumber);
  tc->add_option("--l", o.l, "key period");
  tc->add_option("--out", o.out, "CSV path (stdout if omitted)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "dvs: " << e.what() << '\n';
    return 2;
  }

  try {
    if (gen->parsed()) cmd_gen(o, out);
    if (tr->parsed()) cmd_train(o, out);
    if (rn->parsed()) cmd_run(o, out);
    if (sw->parsed()) cmd_sweep(o, out);
    if (tc->parsed()) cmd_trace(o, out);
  } catch (const ConfigError& e) {
    err << "dvs: configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "dvs: " << e.what() << '\n';
    return 3;
  }
  return 0;
}

}  // namespace dvs::cli
