#include <gtest/gtest.h>

#include <random>

#include "fundus/descriptors/hog.hpp"

using namespace fundus;
using namespace fundus::descriptors;
using imaging::Raster;

namespace {

Raster random_window(std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  Raster w(kWindowCols, kWindowRows, 1);
  for (double& v : w.data()) v = std::uniform_real_distribution<double>(lo, hi)(rng);
  return w;
}

double block_norm(const HogDescriptor& d, std::size_t b) {
  double s = 0.0;
  for (double v : d.block(b)) s += v * v;
  return std::sqrt(s);
}

}  // namespace

TEST(Hog, Layout) {
  const HogDescriptor d = hog(random_window(1));
  EXPECT_EQ(d.blocks_x, 13);
  EXPECT_EQ(d.blocks_y, 14);
  EXPECT_EQ(d.values.size(), 6552u);
}

TEST(Hog, BlocksAreUnitNormOrZero) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const HogDescriptor d = hog(random_window(seed));
    for (std::size_t b = 0; b < d.block_count(); ++b) EXPECT_NEAR(block_norm(d, b), 1.0, 1e-9);
  }
  const HogDescriptor flat = hog(Raster(kWindowCols, kWindowRows, 1, 0.4));
  for (double v : flat.values) EXPECT_EQ(v, 0.0);
}

TEST(Hog, InvariantToGainAndBias) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Raster w = random_window(seed, 0.0, 0.45);
    Raster t = w;
    for (double& v : t.data()) v = 2.0 * v + 0.1;
    const auto a = hog(w).values, b = hog(t).values;
    for (std::size_t i = 0; i < a.size(); ++i) ASSERT_NEAR(a[i], b[i], 1e-6);
  }
}

TEST(Hog, HorizontalRampVotesIntoFirstBin) {
  Raster w(kWindowCols, kWindowRows, 1);
  for (int y = 0; y < kWindowRows; ++y)
    for (int x = 0; x < kWindowCols; ++x) w.at(x, y) = 0.01 * x;
  const HogDescriptor d = hog(w);
  for (std::size_t b = 0; b < d.block_count(); ++b) {
    const auto blk = d.block(b);
    for (int cell = 0; cell < 4; ++cell)
      for (int bin = 1; bin < kBins; ++bin) EXPECT_EQ(blk[cell * kBins + bin], 0.0);
  }
}

TEST(Hog, DiagonalRampSplitsBetweenNeighbouringBins) {
  Raster w(kWindowCols, kWindowRows, 1);
  for (int y = 0; y < kWindowRows; ++y)
    for (int x = 0; x < kWindowCols; ++x) w.at(x, y) = 0.002 * (x + y);
  // 45 degrees sits at 2.25 bin widths: 3/4 of the vote to bin 2, 1/4 to bin 3.
  const auto blk = hog(w).block(20);
  EXPECT_NEAR(blk[2] / blk[3], 3.0, 1e-9);
  EXPECT_EQ(blk[0], 0.0);
}

TEST(Hog, RejectsWrongShape) {
  EXPECT_THROW(hog(Raster(100, kWindowRows, 1)), Error);
  EXPECT_THROW(hog(Raster(kWindowCols, kWindowRows, 3)), Error);
}
