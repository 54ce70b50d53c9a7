#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "dvs/core.h"
#include "dvs/oracle.h"
#include "dvs/region.h"
#include "dvs/warp.h"

namespace dvs {

// Feature layout is frozen per version; bump kFeatureVersion on any change.
inline constexpr int kFeatureVersion = 1;
inline constexpr int kFeatureDim = 9;

enum Feature : int {
  kFlowMagMean = 0,
  kFlowMagStd,
  kFlowMagMax,
  kFlowDivergence,  // mean |du/dx + dv/dy|, central differences
  kFrameDiff,
  kResidualMean,    // |warp_image(key) - cur| over all channels
  kResidualStd,
  kAge,
  kBias,
};

using FeatureVector = std::array<double, kFeatureDim>;

std::string_view feature_name(int index);

FeatureVector extract_features(const Image& key_img, const Image& cur_img, const FlowField& flow,
                               int age);

/// Fully connected regressor: rectifier hidden layers and a logistic output,
/// so predictions always lie strictly inside (0, 1).
///
/// Parameters live in one flat vector, layer by layer: the weight matrix
/// (out x in, row-major) followed by the bias vector. Inputs are standardized
/// with a per-feature shift and scale that travel with the model.
class Regressor {
 public:
  Regressor() = default;
  explicit Regressor(std::vector<int> layer_sizes);

  // Glorot-uniform weights, zero biases.
  static Regressor initialized(std::vector<int> layer_sizes, std::uint64_t seed);

  const std::vector<int>& layer_sizes() const noexcept { return sizes_; }
  int input_dim() const noexcept { return sizes_.empty() ? 0 : sizes_.front(); }
  std::size_t param_count() const noexcept { return params_.size(); }
  std::span<const double> params() const noexcept { return params_; }
  std::span<double> params() noexcept { return params_; }

  std::span<const double> input_shift() const noexcept { return shift_; }
  std::span<const double> input_scale() const noexcept { return scale_; }
  void set_normalization(std::vector<double> shift, std::vector<double> scale);

  double predict(std::span<const double> x) const;
  double predict(const FeatureVector& x) const { return predict(std::span<const double>(x)); }

  // Mean of (predict(x_b) - y_b)^2 over the batch. `xs` is row-major with
  // input_dim() columns. Writes d(loss)/d(params) into `grad`.
  double loss_and_gradient(std::span<const double> xs, std::span<const double> ys,
                           std::span<double> grad) const;

  // Rounds parameters and normalization to float precision so the model
  // survives a checkpoint round trip unchanged.
  void round_to_float();

  bool operator==(const Regressor&) const = default;

 private:
  std::vector<int> sizes_;
  std::vector<double> params_;
  std::vector<double> shift_;
  std::vector<double> scale_;
};

struct MseResult {
  double loss;
  double gradient;  // d(loss)/d(pred)
};
MseResult mse_loss(double pred, double target);

struct AdamState {
  double alpha = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::vector<double> m;
  std::vector<double> v;
  long t = 0;

  static AdamState for_params(std::size_t n, double alpha = 1e-3, double beta1 = 0.9,
                              double beta2 = 0.999, double eps = 1e-8);
  void validate() const;
};

// One bias-corrected Adam update of `weights` in place; increments state.t.
void adam_step(AdamState& state, std::span<double> weights, std::span<const double> grads);

struct Sample {
  FeatureVector x{};
  double target = 0.0;  // true confidence score
};

struct TrainParams {
  int epochs = 200;
  int batch_size = 64;
  double alpha = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double holdout_fraction = 0.2;
  std::vector<int> hidden = {32, 16};
  std::uint64_t seed = 1;
};

struct EpochStats {
  int epoch = 0;
  double train_mse = 0.0;
  double holdout_mse = 0.0;
  double holdout_mae = 0.0;
};

struct TrainReport {
  std::size_t train_size = 0;
  std::size_t holdout_size = 0;
  std::vector<EpochStats> epochs;

  const EpochStats& final() const { return epochs.back(); }
};

struct TrainResult {
  Regressor model;
  TrainReport report;
};

TrainResult train(std::span<const Sample> dataset, const TrainParams& params);

// Mean absolute and mean squared prediction error of `model` on `samples`.
struct ErrorStats {
  double mae = 0.0;
  double mse = 0.0;
};
ErrorStats evaluate(const Regressor& model, std::span<const Sample> samples);

struct TrainingSetOptions {
  WarpConfig warp;
  // Only pairs with cur - key <= max_gap are used; <= 0 means all pairs.
  int max_gap = 0;
};

// Runs both paths for every (key, current) region pair of every sequence and
// labels the pair's features with the resulting confidence score.
std::vector<Sample> build_training_set(std::span<const std::vector<FrameBundle>> sequences,
                                       const DivisionScheme& scheme,
                                       const BackendSpec& backends, std::uint64_t seed,
                                       const TrainingSetOptions& options = {});

// "DVSD" checkpoint: magic, u32 format version, u32 feature version, u32
// layer count, u32 layer sizes, f32 input shift, f32 input scale, f32
// parameters; all little-endian.
void save_regressor(std::ostream& out, const Regressor& model);
Regressor load_regressor(std::istream& in);
void save_regressor(const std::filesystem::path& path, const Regressor& model);
Regressor load_regressor(const std::filesystem::path& path);

}  // namespace dvs
