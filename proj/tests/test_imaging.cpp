#include <gtest/gtest.h>

#include <random>

#include "fundus/imaging/color.hpp"
#include "fundus/imaging/components.hpp"
#include "fundus/imaging/field.hpp"
#include "fundus/imaging/integral.hpp"
#include "fundus/imaging/resize.hpp"
#include "support/oracles.hpp"

using namespace fundus;
using namespace fundus::imaging;

TEST(Color, MatchesScalarOracleOnRandomTriples) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double r = u(rng), g = u(rng), b = u(rng);
    const Lab got = rgb_to_lab(r, g, b);
    const auto want = oracle::lab(r, g, b);
    EXPECT_NEAR(got.L, want.L, 1e-6);
    EXPECT_NEAR(got.a, want.a, 1e-6);
    EXPECT_NEAR(got.b, want.b, 1e-6);
  }
}

TEST(Color, WhiteAndBlack) {
  const Lab w = rgb_to_lab(1, 1, 1), k = rgb_to_lab(0, 0, 0);
  EXPECT_NEAR(w.L, 100.0, 1e-6);
  EXPECT_NEAR(w.a, 0.0, 1e-6);
  EXPECT_NEAR(w.b, 0.0, 1e-6);
  EXPECT_NEAR(k.L, 0.0, 1e-6);
  EXPECT_NEAR(k.a, 0.0, 1e-6);
  EXPECT_NEAR(k.b, 0.0, 1e-6);
}

TEST(Color, GreysHaveNoChroma) {
  for (double v : {0.001, 0.008, 0.2, 0.5, 0.9}) {
    const Lab g = rgb_to_lab(v, v, v);
    EXPECT_NEAR(g.a, 0.0, 1e-9) << v;
    EXPECT_NEAR(g.b, 0.0, 1e-9) << v;
  }
}

TEST(Color, LightnessIncreasesWithGrey) {
  double prev = -1.0;
  for (int i = 0; i <= 100; ++i) {
    const double L = rgb_to_lab(i / 100.0, i / 100.0, i / 100.0).L;
    EXPECT_GT(L, prev);
    prev = L;
  }
}

TEST(Color, RasterConversionMatchesScalar) {
  Raster img(3, 2, 3);
  std::mt19937_64 rng(3);
  for (double& v : img.data()) v = std::uniform_real_distribution<double>(0, 1)(rng);
  const LabRaster lab = rgb_to_lab(img);
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 3; ++x) {
      const Lab s = rgb_to_lab(img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2));
      EXPECT_EQ(lab.planes().at(x, y, 0), s.L);
      EXPECT_EQ(lab.planes().at(x, y, 1), s.a);
      EXPECT_EQ(lab.planes().at(x, y, 2), s.b);
    }
}

TEST(Color, RejectsSingleChannel) { EXPECT_THROW(rgb_to_lab(Raster(4, 4, 1)), Error); }

TEST(Integral, BoxSumsMatchDirectSums) {
  std::mt19937_64 rng(5);
  const int w = 17, h = 11;
  std::vector<double> plane(w * h);
  for (double& v : plane) v = std::uniform_real_distribution<double>(-1, 1)(rng);
  const IntegralImage sat(plane, w, h);
  for (int trial = 0; trial < 500; ++trial) {
    std::uniform_int_distribution<int> ux(0, w), uy(0, h);
    int x0 = ux(rng), x1 = ux(rng), y0 = uy(rng), y1 = uy(rng);
    if (x0 > x1) std::swap(x0, x1);
    if (y0 > y1) std::swap(y0, y1);
    double s = 0.0;
    for (int y = y0; y < y1; ++y)
      for (int x = x0; x < x1; ++x) s += plane[y * w + x];
    EXPECT_NEAR(sat.box_sum(x0, y0, x1, y1), s, 1e-9);
  }
}

TEST(Raster, CropAndIntersect) {
  Raster img(5, 4, 1);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 5; ++x) img.at(x, y) = 10 * y + x;
  const Raster c = crop(img, {3, 2, 10, 10});
  ASSERT_EQ(c.width(), 2);
  ASSERT_EQ(c.height(), 2);
  EXPECT_EQ(c.at(0, 0), 23);
  EXPECT_EQ(c.at(1, 1), 34);
  EXPECT_THROW(crop(img, {7, 7, 2, 2}), Error);
  EXPECT_TRUE(intersect({0, 0, 2, 2}, {5, 5, 2, 2}).empty());
}

TEST(Raster, GainBiasClipsToUnitRange) {
  Raster img(2, 1, 1);
  img.at(0, 0) = 0.2;
  img.at(1, 0) = 0.9;
  const Raster out = adjust_gain_bias(img, 1.2, 0.08);
  EXPECT_NEAR(out.at(0, 0), 0.32, 1e-12);
  EXPECT_EQ(out.at(1, 0), 1.0);
  EXPECT_EQ(adjust_gain_bias(img, 0.8, -0.2).at(0, 0), 0.0);
}

TEST(Raster, RejectsBadShapes) {
  EXPECT_THROW(Raster(0, 3, 1), Error);
  EXPECT_THROW(Raster(3, 3, 2), Error);
}

TEST(Resize, SameSizeIsIdentity) {
  Raster img(6, 5, 3);
  std::mt19937_64 rng(1);
  for (double& v : img.data()) v = std::uniform_real_distribution<double>(0, 1)(rng);
  EXPECT_EQ(resize_bilinear(img, 6, 5), img);
}

TEST(Resize, ConstantStaysConstant) {
  Raster img(9, 7, 1, 0.37);
  const Raster out = resize_bilinear(img, 20, 3);
  for (double v : out.data()) EXPECT_NEAR(v, 0.37, 1e-15);
}

TEST(Resize, LinearRampStaysLinearInside) {
  Raster img(8, 1, 1);
  for (int x = 0; x < 8; ++x) img.at(x, 0) = x;
  const Raster up = resize_bilinear(img, 16, 1);
  // Output sample i maps to source coordinate (i + 0.5) / 2 - 0.5.
  for (int i = 1; i < 15; ++i) EXPECT_NEAR(up.at(i, 0), (i + 0.5) / 2.0 - 0.5, 1e-12);
}

TEST(Components, EightConnectedLabelling) {
  Mask m(6, 4);
  m.set(0, 0, true);
  m.set(1, 1, true);  // diagonal neighbour of (0, 0)
  m.set(4, 0, true);
  m.set(4, 1, true);
  m.set(5, 3, true);
  const Components cc = label_components(m);
  EXPECT_EQ(cc.count, 3);
  EXPECT_EQ(cc.at(0, 0), cc.at(1, 1));
  EXPECT_NE(cc.at(0, 0), cc.at(4, 0));
  EXPECT_EQ(cc.at(2, 2), 0);
}

TEST(Components, RemoveSmall) {
  Mask m(5, 5);
  m.set(0, 0, true);
  for (int x = 2; x < 5; ++x) m.set(x, 4, true);
  const Mask out = remove_small_components(m, 2);
  EXPECT_FALSE(out.at(0, 0));
  EXPECT_TRUE(out.at(3, 4));
  EXPECT_EQ(out.count(), 3u);
}

TEST(Field, OtsuSeparatesTwoModes) {
  std::vector<double> v;
  for (int i = 0; i < 100; ++i) v.push_back(0.1 + 0.001 * (i % 7));
  for (int i = 0; i < 60; ++i) v.push_back(0.7 + 0.001 * (i % 5));
  const double t = otsu_threshold(v);
  EXPECT_GE(t, 0.106);
  EXPECT_LT(t, 0.7);
}

TEST(Field, FieldOfViewIsTheBrightDisc) {
  Raster g(60, 50, 1, 0.02);
  for (int y = 0; y < 50; ++y)
    for (int x = 0; x < 60; ++x)
      if (std::hypot(x - 30, y - 25) < 18) g.at(x, y) = 0.5;
  const Mask fov = field_of_view(g);
  EXPECT_TRUE(fov.at(30, 25));
  EXPECT_FALSE(fov.at(2, 2));
  EXPECT_FALSE(fov.at(30, 45));
}
