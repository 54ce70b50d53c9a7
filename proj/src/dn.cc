#include "dvs/dn.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "dvs/metrics.h"
#include "dvs/rng.h"

namespace dvs {

// ---------------------------------------------------------------------------
// Features

std::string_view feature_name(int index) {
  static constexpr std::array<std::string_view, kFeatureDim> kNames = {
      "flow_mag_mean", "flow_mag_std",  "flow_mag_max", "flow_divergence", "frame_diff",
      "residual_mean", "residual_std", "age",          "bias"};
  if (index < 0 || index >= kFeatureDim) throw ValueError("feature index out of range");
  return kNames[static_cast<std::size_t>(index)];
}

FeatureVector extract_features(const Image& key_img, const Image& cur_img, const FlowField& flow,
                               int age) {
  require_same_size(key_img.width(), key_img.height(), cur_img.width(), cur_img.height(),
                    "extract_features");
  require_same_size(key_img.width(), key_img.height(), flow.width(), flow.height(),
                    "extract_features");
  if (key_img.channels() != cur_img.channels()) {
    throw ShapeError("extract_features: channel mismatch");
  }
  const int w = flow.width();
  const int h = flow.height();
  const double n = static_cast<double>(flow.pixel_count());
  if (n == 0) throw ShapeError("extract_features: empty region");

  FeatureVector f{};
  double sum = 0.0;
  double sum_sq = 0.0;
  double max_mag = 0.0;
  double div_sum = 0.0;
  for (int y = 0; y < h; ++y) {
    const int yu = std::min(y + 1, h - 1);
    const int yd = std::max(y - 1, 0);
    for (int x = 0; x < w; ++x) {
      const double u = flow.u(x, y);
      const double v = flow.v(x, y);
      const double mag = std::sqrt(u * u + v * v);
      sum += mag;
      sum_sq += mag * mag;
      max_mag = std::max(max_mag, mag);

      const int xr = std::min(x + 1, w - 1);
      const int xl = std::max(x - 1, 0);
      const double dudx = xr > xl ? (flow.u(xr, y) - flow.u(xl, y)) / (xr - xl) : 0.0;
      const double dvdy = yu > yd ? (flow.v(x, yu) - flow.v(x, yd)) / (yu - yd) : 0.0;
      div_sum += std::abs(dudx + dvdy);
    }
  }
  const double mean = sum / n;
  f[kFlowMagMean] = mean;
  f[kFlowMagStd] = std::sqrt(std::max(0.0, sum_sq / n - mean * mean));
  f[kFlowMagMax] = max_mag;
  f[kFlowDivergence] = div_sum / n;
  f[kFrameDiff] = frame_difference(key_img, cur_img);

  const Image warped = warp_image(key_img, flow);
  const auto a = warped.data();
  const auto b = cur_img.data();
  double r_sum = 0.0;
  double r_sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double r = std::abs(static_cast<double>(a[i]) - static_cast<double>(b[i]));
    r_sum += r;
    r_sq += r * r;
  }
  const double r_n = static_cast<double>(a.size());
  const double r_mean = r_sum / r_n;
  f[kResidualMean] = r_mean;
  f[kResidualStd] = std::sqrt(std::max(0.0, r_sq / r_n - r_mean * r_mean));
  f[kAge] = static_cast<double>(age);
  f[kBias] = 1.0;
  return f;
}

// ---------------------------------------------------------------------------
// Regressor

namespace {

struct LayerView {
  int in;
  int out;
  std::size_t w_off;
  std::size_t b_off;
};

std::vector<LayerView> layout(const std::vector<int>& sizes) {
  std::vector<LayerView> layers;
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    LayerView v{sizes[l], sizes[l + 1], off, 0};
    off += static_cast<std::size_t>(v.in) * v.out;
    v.b_off = off;
    off += static_cast<std::size_t>(v.out);
    layers.push_back(v);
  }
  return layers;
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double open_unit(double p) {
  static const double kLo = std::nextafter(0.0, 1.0);
  static const double kHi = std::nextafter(1.0, 0.0);
  return std::clamp(p, kLo, kHi);
}

}  // namespace

Regressor::Regressor(std::vector<int> layer_sizes) : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2) throw ConfigError("regressor needs at least input and output layers");
  if (sizes_.back() != 1) throw ConfigError("regressor output layer must have width 1");
  for (int s : sizes_) {
    if (s < 1) throw ConfigError("layer sizes must be positive");
  }
  std::size_t n = 0;
  for (const auto& l : layout(sizes_)) n += static_cast<std::size_t>(l.in + 1) * l.out;
  params_.assign(n, 0.0);
  shift_.assign(static_cast<std::size_t>(sizes_.front()), 0.0);
  scale_.assign(static_cast<std::size_t>(sizes_.front()), 1.0);
}

Regressor Regressor::initialized(std::vector<int> layer_sizes, std::uint64_t seed) {
  Regressor r(std::move(layer_sizes));
  RandomStream rng(seed, StreamTag::kWeightInit);
  for (const auto& l : layout(r.sizes_)) {
    const double limit = std::sqrt(6.0 / (l.in + l.out));
    for (std::size_t i = 0; i < static_cast<std::size_t>(l.in) * l.out; ++i) {
      r.params_[l.w_off + i] = rng.uniform(-limit, limit);
    }
  }
  return r;
}

void Regressor::set_normalization(std::vector<double> shift, std::vector<double> scale) {
  if (shift.size() != static_cast<std::size_t>(input_dim()) || scale.size() != shift.size()) {
    throw ShapeError("normalization size does not match regressor input");
  }
  for (std::size_t i = 0; i < shift.size(); ++i) {
    if (!std::isfinite(shift[i]) || !std::isfinite(scale[i])) {
      throw ValueError("normalization must be finite");
    }
  }
  shift_ = std::move(shift);
  scale_ = std::move(scale);
}

double Regressor::predict(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != input_dim()) {
    throw ShapeError("predict: feature dimension " + std::to_string(x.size()) +
                     " does not match regressor input " + std::to_string(input_dim()));
  }
  std::vector<double> a(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) a[i] = (x[i] - shift_[i]) * scale_[i];
  const auto layers = layout(sizes_);
  std::vector<double> next;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const LayerView& L = layers[l];
    next.assign(static_cast<std::size_t>(L.out), 0.0);
    for (int o = 0; o < L.out; ++o) {
      const double* w = &params_[L.w_off + static_cast<std::size_t>(o) * L.in];
      double z = params_[L.b_off + static_cast<std::size_t>(o)];
      for (int i = 0; i < L.in; ++i) z += w[i] * a[static_cast<std::size_t>(i)];
      next[static_cast<std::size_t>(o)] = (l + 1 < layers.size()) ? std::max(0.0, z) : z;
    }
    a.swap(next);
  }
  return open_unit(sigmoid(a[0]));
}

double Regressor::loss_and_gradient(std::span<const double> xs, std::span<const double> ys,
                                    std::span<double> grad) const {
  const auto in = static_cast<std::size_t>(input_dim());
  if (ys.empty() || xs.size() != ys.size() * in) {
    throw ShapeError("loss_and_gradient: batch shape mismatch");
  }
  if (grad.size() != params_.size()) throw ShapeError("gradient buffer size mismatch");
  std::fill(grad.begin(), grad.end(), 0.0);

  const auto layers = layout(sizes_);
  // acts[0] is the standardized input, acts[l+1] the output of layer l
  // (post-activation for hidden layers, pre-activation for the last).
  std::vector<std::vector<double>> acts(layers.size() + 1);
  std::vector<std::vector<double>> deltas(layers.size());
  acts[0].resize(in);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    acts[l + 1].resize(static_cast<std::size_t>(layers[l].out));
    deltas[l].resize(static_cast<std::size_t>(layers[l].out));
  }

  const double inv_b = 1.0 / static_cast<double>(ys.size());
  double loss = 0.0;
  for (std::size_t b = 0; b < ys.size(); ++b) {
    for (std::size_t i = 0; i < in; ++i) acts[0][i] = (xs[b * in + i] - shift_[i]) * scale_[i];
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const LayerView& L = layers[l];
      for (int o = 0; o < L.out; ++o) {
        const double* w = &params_[L.w_off + static_cast<std::size_t>(o) * L.in];
        double z = params_[L.b_off + static_cast<std::size_t>(o)];
        for (int i = 0; i < L.in; ++i) z += w[i] * acts[l][static_cast<std::size_t>(i)];
        acts[l + 1][static_cast<std::size_t>(o)] = (l + 1 < layers.size()) ? std::max(0.0, z) : z;
      }
    }
    const double p = sigmoid(acts.back()[0]);
    const MseResult m = mse_loss(p, ys[b]);
    loss += m.loss * inv_b;
    deltas.back()[0] = m.gradient * inv_b * p * (1.0 - p);

    for (std::size_t l = layers.size(); l-- > 0;) {
      const LayerView& L = layers[l];
      const std::vector<double>& a_in = acts[l];
      for (int o = 0; o < L.out; ++o) {
        const double d = deltas[l][static_cast<std::size_t>(o)];
        if (d == 0.0) continue;
        double* gw = &grad[L.w_off + static_cast<std::size_t>(o) * L.in];
        for (int i = 0; i < L.in; ++i) gw[i] += d * a_in[static_cast<std::size_t>(i)];
        grad[L.b_off + static_cast<std::size_t>(o)] += d;
      }
      if (l == 0) break;
      std::vector<double>& d_prev = deltas[l - 1];
      std::fill(d_prev.begin(), d_prev.end(), 0.0);
      for (int o = 0; o < L.out; ++o) {
        const double d = deltas[l][static_cast<std::size_t>(o)];
        if (d == 0.0) continue;
        const double* w = &params_[L.w_off + static_cast<std::size_t>(o) * L.in];
        for (int i = 0; i < L.in; ++i) d_prev[static_cast<std::size_t>(i)] += d * w[i];
      }
      for (std::size_t i = 0; i < d_prev.size(); ++i) {
        if (a_in[i] <= 0.0) d_prev[i] = 0.0;  // rectifier gate
      }
    }
  }
  return loss;
}

void Regressor::round_to_float() {
  auto rnd = [](double& v) { v = static_cast<double>(static_cast<float>(v)); };
  std::ranges::for_each(params_, rnd);
  std::ranges::for_each(shift_, rnd);
  std::ranges::for_each(scale_, rnd);
}

MseResult mse_loss(double pred, double target) {
  const double d = pred - target;
  return {d * d, 2.0 * d};
}

// ---------------------------------------------------------------------------
// Adam

AdamState AdamState::for_params(std::size_t n, double alpha, double beta1, double beta2,
                                double eps) {
  AdamState s;
  s.alpha = alpha;
  s.beta1 = beta1;
  s.beta2 = beta2;
  s.eps = eps;
  s.m.assign(n, 0.0);
  s.v.assign(n, 0.0);
  s.validate();
  return s;
}

void AdamState::validate() const {
  if (!(beta1 >= 0 && beta1 < 1 && beta2 >= 0 && beta2 < 1)) {
    throw ConfigError("Adam betas must lie in [0, 1)");
  }
  if (!(eps > 0)) throw ConfigError("Adam epsilon must be > 0");
  if (!(alpha > 0)) throw ConfigError("Adam learning rate must be > 0");
  if (t < 0) throw ConfigError("Adam step count must be >= 0");
  if (m.size() != v.size()) throw ShapeError("Adam moment shapes differ");
}

void adam_step(AdamState& s, std::span<double> weights, std::span<const double> grads) {
  if (weights.size() != grads.size() || s.m.size() != weights.size() ||
      s.v.size() != weights.size()) {
    throw ShapeError("adam_step: weights, gradients and moments differ in size");
  }
  ++s.t;
  const double c1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.t));
  const double c2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.t));
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double g = grads[i];
    s.m[i] = s.beta1 * s.m[i] + (1.0 - s.beta1) * g;
    s.v[i] = s.beta2 * s.v[i] + (1.0 - s.beta2) * g * g;
    const double m_hat = s.m[i] / c1;
    const double v_hat = s.v[i] / c2;
    weights[i] -= s.alpha * m_hat / (std::sqrt(v_hat) + s.eps);
  }
}

// ---------------------------------------------------------------------------
// Training

ErrorStats evaluate(const Regressor& model, std::span<const Sample> samples) {
  ErrorStats e;
  if (samples.empty()) return e;
  for (const Sample& s : samples) {
    const double d = model.predict(s.x) - s.target;
    e.mae += std::abs(d);
    e.mse += d * d;
  }
  e.mae /= static_cast<double>(samples.size());
  e.mse /= static_cast<double>(samples.size());
  return e;
}

TrainResult train(std::span<const Sample> dataset, const TrainParams& p) {
  if (dataset.empty()) throw ConfigError("train: empty dataset");
  if (p.epochs < 1 || p.batch_size < 1) throw ConfigError("train: epochs and batch must be >= 1");
  if (!(p.holdout_fraction >= 0.0 && p.holdout_fraction < 1.0)) {
    throw ConfigError("train: holdout fraction must be in [0, 1)");
  }
  for (const Sample& s : dataset) {
    if (!(s.target >= 0.0 && s.target <= 1.0)) throw ConfigError("train: target outside [0,1]");
    for (double v : s.x) {
      if (!std::isfinite(v)) throw ConfigError("train: non-finite feature");
    }
  }

  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  RandomStream split_rng(p.seed, StreamTag::kTrainSplit);
  split_rng.shuffle(order);
  std::size_t n_hold = static_cast<std::size_t>(std::llround(p.holdout_fraction * dataset.size()));
  if (p.holdout_fraction > 0 && n_hold == 0 && dataset.size() > 1) n_hold = 1;
  std::vector<Sample> holdout;
  std::vector<Sample> train_set;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < n_hold ? holdout : train_set).push_back(dataset[order[i]]);
  }

  // Standardize on the training split; constant features pass through.
  std::vector<double> shift(kFeatureDim, 0.0);
  std::vector<double> scale(kFeatureDim, 1.0);
  for (int j = 0; j < kFeatureDim; ++j) {
    double mean = 0.0;
    for (const Sample& s : train_set) mean += s.x[static_cast<std::size_t>(j)];
    mean /= static_cast<double>(train_set.size());
    double var = 0.0;
    for (const Sample& s : train_set) {
      const double d = s.x[static_cast<std::size_t>(j)] - mean;
      var += d * d;
    }
    var /= static_cast<double>(train_set.size());
    if (var > 1e-18) {
      shift[static_cast<std::size_t>(j)] = mean;
      scale[static_cast<std::size_t>(j)] = 1.0 / std::sqrt(var);
    }
  }

  std::vector<int> sizes;
  sizes.push_back(kFeatureDim);
  sizes.insert(sizes.end(), p.hidden.begin(), p.hidden.end());
  sizes.push_back(1);
  TrainResult result;
  result.model = Regressor::initialized(sizes, p.seed);
  result.model.set_normalization(shift, scale);
  result.model.round_to_float();

  AdamState adam = AdamState::for_params(result.model.param_count(), p.alpha, p.beta1, p.beta2,
                                         p.eps);
  std::vector<double> grad(result.model.param_count());
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<std::size_t> idx(train_set.size());
  std::iota(idx.begin(), idx.end(), 0);

  const std::span<const Sample> eval_set =
      holdout.empty() ? std::span<const Sample>(train_set) : std::span<const Sample>(holdout);
  result.report.train_size = train_set.size();
  result.report.holdout_size = holdout.size();

  for (int epoch = 0; epoch < p.epochs; ++epoch) {
    RandomStream shuffle_rng(p.seed, StreamTag::kShuffle, {static_cast<std::uint64_t>(epoch)});
    shuffle_rng.shuffle(idx);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < idx.size(); start += static_cast<std::size_t>(p.batch_size)) {
      const std::size_t end = std::min(idx.size(), start + static_cast<std::size_t>(p.batch_size));
      xs.clear();
      ys.clear();
      for (std::size_t k = start; k < end; ++k) {
        const Sample& s = train_set[idx[k]];
        xs.insert(xs.end(), s.x.begin(), s.x.end());
        ys.push_back(s.target);
      }
      const double loss = result.model.loss_and_gradient(xs, ys, grad);
      epoch_loss += loss * static_cast<double>(end - start);
      adam_step(adam, result.model.params(), grad);
    }
    const ErrorStats hold = evaluate(result.model, eval_set);
    result.report.epochs.push_back(
        {epoch + 1, epoch_loss / static_cast<double>(idx.size()), hold.mse, hold.mae});
  }

  result.model.round_to_float();
  const ErrorStats hold = evaluate(result.model, eval_set);
  result.report.epochs.back().holdout_mse = hold.mse;
  result.report.epochs.back().holdout_mae = hold.mae;
  return result;
}

std::vector<Sample> build_training_set(std::span<const std::vector<FrameBundle>> sequences,
                                       const DivisionScheme& scheme,
                                       const BackendSpec& backends, std::uint64_t seed,
                                       const TrainingSetOptions& options) {
  backends.validate();
  std::vector<Sample> out;
  for (std::size_t s = 0; s < sequences.size(); ++s) {
    const std::vector<FrameBundle>& seq = sequences[s];
    if (seq.size() < 2) continue;
    const int n = static_cast<int>(seq.size());
    const auto geoms = make_regions(scheme, seq.front().image.width(), seq.front().image.height());
    for (std::size_t r = 0; r < geoms.size(); ++r) {
      std::vector<Image> imgs;
      std::vector<LabelMap> segs;
      for (int f = 0; f < n; ++f) {
        imgs.push_back(crop(seq[static_cast<std::size_t>(f)].image, geoms[r]));
        const PixelNoise noise(derive_key(seed, StreamTag::kSegOracle,
                                          {s, static_cast<std::uint64_t>(f)}));
        segs.push_back(seg_oracle(imgs.back(),
                                  crop(seq[static_cast<std::size_t>(f)].truth_labels, geoms[r]),
                                  backends, noise.offset(geoms[r].region.x, geoms[r].region.y)));
      }
      for (int k = 0; k < n; ++k) {
        for (int i = k + 1; i < n; ++i) {
          if (options.max_gap > 0 && i - k > options.max_gap) break;
          const PixelNoise noise(derive_key(
              seed, StreamTag::kFlowOracle,
              {s, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(i)}));
          const FlowField flow = flow_oracle(k, i, seq, geoms[r], backends, noise);
          const LabelMap warped = warp_labels(segs[static_cast<std::size_t>(k)], flow, options.warp);
          Sample sample;
          sample.x = extract_features(imgs[static_cast<std::size_t>(k)],
                                      imgs[static_cast<std::size_t>(i)], flow, i - k - 1);
          sample.target = confidence_score(warped, segs[static_cast<std::size_t>(i)]);
          out.push_back(sample);
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Checkpoint

namespace {

constexpr char kDnMagic[4] = {'D', 'V', 'S', 'D'};
constexpr std::uint32_t kCheckpointVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(b, 4);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw IoError("truncated DVSD checkpoint");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f32(std::ostream& out, double v) {
  put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

double get_f32(std::istream& in) { return std::bit_cast<float>(get_u32(in)); }

}  // namespace

void save_regressor(std::ostream& out, const Regressor& model) {
  out.write(kDnMagic, 4);
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(kFeatureVersion));
  put_u32(out, static_cast<std::uint32_t>(model.layer_sizes().size()));
  for (int s : model.layer_sizes()) put_u32(out, static_cast<std::uint32_t>(s));
  for (double v : model.input_shift()) put_f32(out, v);
  for (double v : model.input_scale()) put_f32(out, v);
  for (double v : model.params()) put_f32(out, v);
  if (!out) throw IoError("DVSD write failed");
}

Regressor load_regressor(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || !std::equal(magic, magic + 4, kDnMagic)) {
    throw IoError("not a DVSD checkpoint (bad magic)");
  }
  const std::uint32_t version = get_u32(in);
  if (version != kCheckpointVersion) {
    throw IoError("unsupported DVSD version " + std::to_string(version));
  }
  const std::uint32_t feature_version = get_u32(in);
  if (feature_version != static_cast<std::uint32_t>(kFeatureVersion)) {
    throw IoError("checkpoint feature version " + std::to_string(feature_version) +
                  " does not match this build (" + std::to_string(kFeatureVersion) + ")");
  }
  const std::uint32_t n_layers = get_u32(in);
  if (n_layers < 2 || n_layers > 64) throw IoError("implausible DVSD layer count");
  std::vector<int> sizes;
  for (std::uint32_t i = 0; i < n_layers; ++i) {
    const std::uint32_t s = get_u32(in);
    if (s == 0 || s > 65536) throw IoError("implausible DVSD layer size");
    sizes.push_back(static_cast<int>(s));
  }
  Regressor model(sizes);
  std::vector<double> shift(static_cast<std::size_t>(model.input_dim()));
  std::vector<double> scale(shift.size());
  for (double& v : shift) v = get_f32(in);
  for (double& v : scale) v = get_f32(in);
  model.set_normalization(std::move(shift), std::move(scale));
  for (double& v : model.params()) {
    v = get_f32(in);
    if (!std::isfinite(v)) throw IoError("DVSD checkpoint holds a non-finite weight");
  }
  return model;
}

void save_regressor(const std::filesystem::path& path, const Regressor& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  save_regressor(out, model);
}

Regressor load_regressor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open DN checkpoint " + path.string());
  return load_regressor(in);
}

}  // namespace dvs
