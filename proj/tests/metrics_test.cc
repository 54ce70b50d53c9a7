#include <gtest/gtest.h>

#include <random>

#include "dvs/metrics.h"
#include "fixtures.h"

namespace dvs {
namespace {

LabelMap row(std::vector<Label> v, int k = 2) {
  const int w = static_cast<int>(v.size());
  return LabelMap(w, 1, k, std::move(v));
}

TEST(ConfidenceScore, IdentityAndTotalDisagreement) {
  std::mt19937_64 g(9);
  const LabelMap m = testing::random_labels(g, 6, 6, 4);
  EXPECT_EQ(confidence_score(m, m), 1.0);
  EXPECT_EQ(confidence_score(row({0, 0, 0}), row({1, 1, 1})), 0.0);
}

TEST(ConfidenceScore, FourPixelExample) {
  EXPECT_EQ(confidence_score(row({0, 0, 1, 1}), row({0, 1, 1, 0})), 0.5);
}

TEST(ConfidenceScore, SizeMismatchRaises) {
  EXPECT_THROW(confidence_score(row({0, 1}), row({0, 1, 1})), ShapeError);
}

TEST(FrameDifference, Examples) {
  const Image a = Image::filled(3, 3, 3, 0.4f);
  EXPECT_EQ(frame_difference(a, a), 0.0);
  EXPECT_DOUBLE_EQ(frame_difference(Image::filled(2, 2, 1, 1.0f), Image::filled(2, 2, 1, 0.0f)),
                   1.0);
  EXPECT_DOUBLE_EQ(frame_difference(Image(2, 1, 1, {1.0f, 0.5f}), Image(2, 1, 1, {0.5f, 0.5f})),
                   0.25);
}

TEST(FrameDifference, SquaredNorm) {
  EXPECT_DOUBLE_EQ(frame_difference(Image(2, 1, 1, {1.0f, 0.5f}), Image(2, 1, 1, {0.5f, 0.5f}),
                                    DiffNorm::kSquared),
                   0.125);
}

TEST(FlowMagnitude, Examples) {
  EXPECT_EQ(flow_magnitude(FlowField::uniform(4, 4, 0, 0)), 0.0);
  EXPECT_DOUBLE_EQ(flow_magnitude(FlowField::uniform(4, 4, 3, 4)), 5.0);
  EXPECT_DOUBLE_EQ(flow_magnitude(FlowField(2, 1, {1, 0, 0, 1})), 1.0);
}

TEST(Miou, PerfectPrediction) {
  std::mt19937_64 g(4);
  const LabelMap m = testing::random_labels(g, 8, 8, 5);
  EXPECT_EQ(miou(accumulate(ConfusionMatrix(5), m, m)), 1.0);
}

TEST(Miou, HandComputedTwoClassExample) {
  const auto cm = accumulate(ConfusionMatrix(2), row({0, 0, 1, 1}), row({0, 1, 1, 1}));
  EXPECT_DOUBLE_EQ(cm.iou(0), 0.5);
  EXPECT_DOUBLE_EQ(cm.iou(1), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(miou(cm), 7.0 / 12.0);
}

TEST(Miou, TotalDisagreementIsZero) {
  EXPECT_EQ(miou(accumulate(ConfusionMatrix(2), row({0, 1}), row({1, 0}))), 0.0);
}

TEST(Miou, AbsentClassesAreExcluded) {
  // Class 2 never appears in truth or prediction.
  const auto cm = accumulate(ConfusionMatrix(3), row({0, 1}, 3), row({0, 1}, 3));
  EXPECT_FALSE(cm.class_present(2));
  EXPECT_EQ(miou(cm), 1.0);
  EXPECT_THROW(cm.iou(2), UndefinedMeasureError);
}

TEST(Miou, EmptyMatrixIsUndefined) {
  EXPECT_THROW(miou(ConfusionMatrix(3)), UndefinedMeasureError);
}

TEST(ConfusionMatrix, RejectsOutOfRangeIds) {
  ConfusionMatrix cm(2);
  EXPECT_THROW(cm.accumulate(row({0, 2}, 3), row({0, 0}, 3)), ClassRangeError);
  EXPECT_EQ(cm.total(), 0u);
}

TEST(ConfusionMatrix, MergeEqualsJointAccumulation) {
  std::mt19937_64 g(12);
  const LabelMap t1 = testing::random_labels(g, 9, 7, 4), p1 = testing::random_labels(g, 9, 7, 4);
  const LabelMap t2 = testing::random_labels(g, 9, 7, 4), p2 = testing::random_labels(g, 9, 7, 4);
  ConfusionMatrix a = accumulate(ConfusionMatrix(4), t1, p1);
  a.merge(accumulate(ConfusionMatrix(4), t2, p2));
  ConfusionMatrix b(4);
  b.accumulate(t1, p1);
  b.accumulate(t2, p2);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.total(), 2u * 63u);
  EXPECT_THROW(a.merge(ConfusionMatrix(3)), ShapeError);
}

TEST(Metrics, MatchNaiveReferencesOnRandomFixtures) {
  std::mt19937_64 g(99);
  for (int i = 0; i < 50; ++i) {
    const LabelMap a = testing::random_labels(g, 16, 16, 3), b = testing::random_labels(g, 16, 16, 3);
    EXPECT_EQ(confidence_score(a, b), testing::naive_confidence(a, b));
    EXPECT_NEAR(miou(accumulate(ConfusionMatrix(3), a, b)), testing::naive_miou(a, b), 1e-12);
    const Image x = testing::random_image(g, 16, 16, 3), y = testing::random_image(g, 16, 16, 3);
    EXPECT_NEAR(frame_difference(x, y), testing::naive_frame_diff(x, y), 1e-12);
    const FlowField f = testing::random_flow(g, 16, 16, 5.0f);
    EXPECT_NEAR(flow_magnitude(f), testing::naive_flow_mag(f), 1e-12);
  }
}

}  // namespace
}  // namespace dvs
