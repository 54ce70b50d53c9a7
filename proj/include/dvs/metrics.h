#pragma once

#include <cstdint>
#include <vector>

#include "dvs/core.h"

namespace dvs {

// Fraction of pixels on which two label maps agree.
double confidence_score(const LabelMap& warped, const LabelMap& segmented);

enum class DiffNorm { kAbsolute, kSquared };

// Mean per-pixel grayscale difference between two frames. kSquared is kept
// for sensitivity studies; kAbsolute is the decision metric.
double frame_difference(const Image& a, const Image& b, DiffNorm norm = DiffNorm::kAbsolute);

// Mean Euclidean length of the flow vectors.
double flow_magnitude(const FlowField& flow);

// Pixel tallies with rows = ground truth, columns = prediction.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int num_classes);

  int num_classes() const noexcept { return num_classes_; }
  std::uint64_t count(int truth, int pred) const noexcept {
    return counts_[static_cast<std::size_t>(truth) * num_classes_ + pred];
  }
  std::uint64_t total() const noexcept { return total_; }

  void accumulate(const LabelMap& truth, const LabelMap& pred);
  void merge(const ConfusionMatrix& other);

  // IoU of one class; undefined (throws) when the class never occurs in
  // either truth or prediction.
  double iou(int cls) const;
  bool class_present(int cls) const noexcept;

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  int num_classes_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

ConfusionMatrix accumulate(ConfusionMatrix cm, const LabelMap& truth, const LabelMap& pred);

// Mean IoU over classes with TP+FP+FN > 0.
double miou(const ConfusionMatrix& cm);

}  // namespace dvs
