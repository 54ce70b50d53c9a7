#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>

#include "dvs/core.h"
#include "dvs/grid_io.h"
#include "fixtures.h"

namespace dvs {
namespace {

TEST(Image, RejectsValuesOutsideUnitRange) {
  EXPECT_THROW(Image(1, 1, 1, {1.5f}), ValueError);
  EXPECT_THROW(Image(1, 1, 1, {-0.1f}), ValueError);
  EXPECT_THROW(Image(2, 1, 2, {0, 0, 0, 0}), ShapeError);
}

TEST(Image, RejectsPayloadLengthMismatch) { EXPECT_THROW(Image(2, 2, 1, {0.f}), ShapeError); }

TEST(LabelMap, RejectsIdsOutsideClassRange) {
  EXPECT_THROW(LabelMap(2, 1, 2, {0, 2}), ClassRangeError);
  EXPECT_THROW(LabelMap(2, 1, 2, {-1, 0}), ClassRangeError);
}

TEST(FlowField, RejectsNonFiniteValues) {
  EXPECT_THROW(FlowField(1, 1, {0.f, std::numeric_limits<float>::quiet_NaN()}), ValueError);
}

TEST(Crop, FullFrameIsIdentity) {
  std::mt19937_64 g(1);
  const LabelMap m = testing::random_labels(g, 7, 5, 3);
  EXPECT_EQ(crop(m, Rect{0, 0, 7, 5}), m);
}

TEST(Crop, SinglePixelFromTwoByTwo) {
  const LabelMap m(2, 2, 4, {0, 1, 2, 3});
  const LabelMap c = crop(m, Rect{1, 1, 1, 1});
  ASSERT_EQ(c.width(), 1);
  EXPECT_EQ(c.at(0, 0), 3);
}

TEST(Crop, OutOfFrameRaises) {
  const LabelMap m = LabelMap::filled(4, 4, 2, 0);
  EXPECT_THROW(crop(m, Rect{-1, 0, 2, 2}), BoundsError);
  EXPECT_THROW(crop(m, Rect{3, 3, 2, 2}), BoundsError);
}

TEST(Embed, WritesPatchAtOffset) {
  const LabelMap frame = LabelMap::filled(4, 3, 5, 0);
  const LabelMap patch = LabelMap::filled(2, 2, 5, 4);
  const LabelMap out = embed(frame, patch, 1, 1);
  EXPECT_EQ(out.at(0, 0), 0);
  EXPECT_EQ(out.at(1, 1), 4);
  EXPECT_EQ(out.at(2, 2), 4);
  EXPECT_EQ(out.at(3, 2), 0);
  EXPECT_THROW(embed(frame, patch, 3, 0), BoundsError);
}

TEST(Grayscale, WhiteBlackAndRed) {
  EXPECT_FLOAT_EQ(to_grayscale(Image::filled(2, 2, 3, 1.0f)).at(1, 1), 1.0f);
  EXPECT_FLOAT_EQ(to_grayscale(Image::filled(2, 2, 3, 0.0f)).at(0, 0), 0.0f);
  const Image red(1, 1, 3, {1.0f, 0.0f, 0.0f});
  EXPECT_NEAR(to_grayscale(red).at(0, 0), 0.299, 1e-7);
}

TEST(GridIo, RoundTripsEveryGridKind) {
  std::mt19937_64 g(3);
  const Image img = testing::random_image(g, 5, 4, 3);
  const LabelMap labels = testing::random_labels(g, 5, 4, 7);
  const FlowField flow = testing::random_flow(g, 5, 4, 3.0f);
  const auto dir = std::filesystem::temp_directory_path() / "dvs_core_test";
  std::filesystem::create_directories(dir);
  save(dir / "i.dvsg", img);
  save(dir / "l.dvsg", labels);
  save(dir / "f.dvsg", flow);
  EXPECT_EQ(load_image(dir / "i.dvsg"), img);
  EXPECT_EQ(load_labels(dir / "l.dvsg", 7), labels);
  EXPECT_EQ(load_flow(dir / "f.dvsg"), flow);
}

TEST(GridIo, HeaderIsLittleEndianWithMagic) {
  std::ostringstream out;
  write_grid(out, Grid<float>(2, 1, 1, std::vector<float>{1.0f, 0.5f}));
  const std::string s = out.str();
  ASSERT_EQ(s.size(), 4u + 12u + 8u);
  EXPECT_EQ(s.substr(0, 4), "DVSG");
  EXPECT_EQ(static_cast<unsigned char>(s[4]), 2);
  EXPECT_EQ(static_cast<unsigned char>(s[8]), 1);
  EXPECT_EQ(static_cast<unsigned char>(s[12]), 1);
}

TEST(GridIo, RejectsBadMagicAndTruncation) {
  std::istringstream bad("XXXX0000");
  EXPECT_THROW(read_grid(bad), IoError);
  std::ostringstream out;
  write_grid(out, Grid<float>(4, 4, 1, 0.0f));
  std::istringstream truncated(out.str().substr(0, 30));
  EXPECT_THROW(read_grid(truncated), IoError);
}

}  // namespace
}  // namespace dvs
