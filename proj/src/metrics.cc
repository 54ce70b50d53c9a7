#include "dvs/metrics.h"

#include <cmath>
#include <string>

namespace dvs {

double confidence_score(const LabelMap& warped, const LabelMap& segmented) {
  require_same_size(warped.width(), warped.height(), segmented.width(), segmented.height(),
                    "confidence_score");
  const auto a = warped.data();
  const auto b = segmented.data();
  if (a.empty()) throw ShapeError("confidence_score: empty region");
  std::size_t agree = 0;
  for (std::size_t i = 0; i < a.size(); ++i) agree += (a[i] == b[i]);
  return static_cast<double>(agree) / static_cast<double>(a.size());
}

namespace {

// BT.601 luma in double precision.
double luma(const Image& img, int x, int y) {
  if (img.channels() == 1) return img.at(x, y);
  return 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) + 0.114 * img.at(x, y, 2);
}

}  // namespace

double frame_difference(const Image& a, const Image& b, DiffNorm norm) {
  require_same_size(a.width(), a.height(), b.width(), b.height(), "frame_difference");
  if (a.pixel_count() == 0) throw ShapeError("frame_difference: empty frame");
  double sum = 0.0;
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      const double d = luma(a, x, y) - luma(b, x, y);
      sum += norm == DiffNorm::kAbsolute ? std::abs(d) : d * d;
    }
  }
  return sum / static_cast<double>(a.pixel_count());
}

double flow_magnitude(const FlowField& flow) {
  if (flow.pixel_count() == 0) throw ShapeError("flow_magnitude: empty field");
  double sum = 0.0;
  const auto d = flow.data();
  for (std::size_t i = 0; i < d.size(); i += 2) {
    const double u = d[i];
    const double v = d[i + 1];
    sum += std::sqrt(u * u + v * v);
  }
  return sum / static_cast<double>(flow.pixel_count());
}

ConfusionMatrix::ConfusionMatrix(int num_classes) : num_classes_(num_classes) {
  if (num_classes < 1) throw ValueError("confusion matrix needs at least one class");
  counts_.assign(static_cast<std::size_t>(num_classes) * num_classes, 0);
}

void ConfusionMatrix::accumulate(const LabelMap& truth, const LabelMap& pred) {
  require_same_size(truth.width(), truth.height(), pred.width(), pred.height(), "accumulate");
  const auto t = truth.data();
  const auto p = pred.data();
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < 0 || t[i] >= num_classes_ || p[i] < 0 || p[i] >= num_classes_) {
      throw ClassRangeError("label id outside confusion matrix range [0, " +
                            std::to_string(num_classes_) + ")");
    }
  }
  for (std::size_t i = 0; i < t.size(); ++i) {
    ++counts_[static_cast<std::size_t>(t[i]) * num_classes_ + p[i]];
  }
  total_ += t.size();
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
  if (other.num_classes_ != num_classes_) {
    throw ShapeError("cannot merge confusion matrices of different class counts");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  total_ += other.total_;
}

bool ConfusionMatrix::class_present(int cls) const noexcept {
  for (int k = 0; k < num_classes_; ++k) {
    if (count(cls, k) != 0 || count(k, cls) != 0) return true;
  }
  return false;
}

double ConfusionMatrix::iou(int cls) const {
  if (cls < 0 || cls >= num_classes_) throw ClassRangeError("class outside matrix");
  const std::uint64_t tp = count(cls, cls);
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  for (int k = 0; k < num_classes_; ++k) {
    if (k == cls) continue;
    fp += count(k, cls);
    fn += count(cls, k);
  }
  const std::uint64_t denom = tp + fp + fn;
  if (denom == 0) throw UndefinedMeasureError("IoU undefined for absent class");
  return static_cast<double>(tp) / static_cast<double>(denom);
}

ConfusionMatrix accumulate(ConfusionMatrix cm, const LabelMap& truth, const LabelMap& pred) {
  cm.accumulate(truth, pred);
  return cm;
}

double miou(const ConfusionMatrix& cm) {
  double sum = 0.0;
  int present = 0;
  for (int c = 0; c < cm.num_classes(); ++c) {
    if (!cm.class_present(c)) continue;
    sum += cm.iou(c);
    ++present;
  }
  if (present == 0) throw UndefinedMeasureError("mIoU undefined: no class has any pixels");
  return sum / present;
}

}  // namespace dvs
