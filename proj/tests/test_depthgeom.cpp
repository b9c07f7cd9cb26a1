#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "depthcap/depthgeom/depthgeom.hpp"
#include "depthcap/errors.hpp"
#include "depthcap/numerics/params.hpp"
#include "oracles.hpp"

using namespace depthcap;
using geom::DepthValue;
using ingest::Box;
using ingest::DepthMap;

namespace {

DepthMap uniform(std::size_t w, std::size_t h, std::uint8_t v) { return {w, h, std::vector<std::uint8_t>(w * h, v)}; }

}  // namespace

TEST(DepthValue, UniformMap) {
  const DepthMap m = uniform(10, 8, 7);
  EXPECT_EQ(geom::depth_value_of_region(m, {0, 0, 10, 8}).value, 7);
  EXPECT_EQ(geom::depth_value_of_region(m, {2.5, 1.2, 3.7, 2.0}).value, 7);
}

TEST(DepthValue, MajorityWins) {
  DepthMap m = uniform(4, 4, 200);
  for (int i = 0; i < 9; ++i) m.values[static_cast<std::size_t>(i)] = 10;
  EXPECT_EQ(geom::depth_value_of_region(m, {0, 0, 4, 4}).value, 10);
}

TEST(DepthValue, TieGoesToSmallerValue) {
  DepthMap m = uniform(4, 4, 60);
  for (int i = 0; i < 8; ++i) m.values[static_cast<std::size_t>(i)] = 50;
  EXPECT_EQ(geom::depth_value_of_region(m, {0, 0, 4, 4}).value, 50);
  for (int i = 0; i < 8; ++i) m.values[static_cast<std::size_t>(i)] = 70;
  EXPECT_EQ(geom::depth_value_of_region(m, {0, 0, 4, 4}).value, 60);
}

TEST(DepthValue, Errors) {
  const DepthMap m = uniform(4, 4, 1);
  EXPECT_THROW(geom::depth_value_of_region(m, {0, 0, 5, 4}), ArgumentError);
  EXPECT_THROW(geom::depth_value_of_region(m, {2, 2, 2, 3}), DegenerateBoxError);
}

TEST(DepthValue, PixelCoverageIsHalfOpen) {
  const auto r = geom::pixel_coverage({1, 2, 3, 4}, 10, 10);
  EXPECT_EQ(r.x0, 1u);
  EXPECT_EQ(r.x1, 3u);
  EXPECT_EQ(r.y0, 2u);
  EXPECT_EQ(r.y1, 4u);
  const auto f = geom::pixel_coverage({1.5, 2.2, 2.5, 3.9}, 10, 10);
  EXPECT_EQ(f.x0, 1u);
  EXPECT_EQ(f.x1, 3u);
  EXPECT_EQ(f.y1, 4u);
}

TEST(DepthValue, MatchesBruteForceOracle) {
  num::SplitMix64 rng(2024);
  int cases = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t w = 1 + rng.below(24), h = 1 + rng.below(24);
    DepthMap m{w, h, std::vector<std::uint8_t>(w * h)};
    // Few distinct values so ties actually happen.
    const std::size_t palette = 1 + rng.below(6);
    std::vector<std::uint8_t> colours(palette);
    for (auto& c : colours) c = static_cast<std::uint8_t>(rng.below(256));
    for (auto& v : m.values) v = colours[rng.below(palette)];
    const int x0 = static_cast<int>(rng.below(w)), y0 = static_cast<int>(rng.below(h));
    const int x1 = x0 + 1 + static_cast<int>(rng.below(w - x0)), y1 = y0 + 1 + static_cast<int>(rng.below(h - y0));
    const Box box{double(x0), double(y0), double(x1), double(y1)};
    ASSERT_EQ(geom::depth_value_of_region(m, box).value, depthcap::testing::brute_force_mode(m, x0, y0, x1, y1)) << "trial " << trial;
    ++cases;
  }
  EXPECT_GE(cases, 100);
}

TEST(SpatialFeature, Examples) {
  EXPECT_EQ(geom::spatial_feature({0, 0, 64, 48}, {255}, 64, 48), (geom::SpatialFeature{0, 0, 1, 1, 1}));
  EXPECT_EQ(geom::spatial_feature({0, 0, 64, 48}, {0}, 64, 48), (geom::SpatialFeature{0, 0, 1, 1, 0}));
  const auto f = geom::spatial_feature({10, 20, 30, 80}, {51}, 100, 100);
  const geom::SpatialFeature expected{0.1, 0.2, 0.3, 0.8, 0.2};
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(f[i], expected[i], 1e-15);
}

TEST(SpatialFeature, ComponentsInUnitIntervalAndOrdered) {
  num::SplitMix64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const double w = 1 + rng.below(500), h = 1 + rng.below(500);
    const double x0 = rng.uniform(0, w * 0.99), y0 = rng.uniform(0, h * 0.99);
    const Box b{x0, y0, rng.uniform(x0, w) + 1e-9, rng.uniform(y0, h) + 1e-9};
    const Box clipped{b.x_tl, b.y_tl, std::min(b.x_br, w), std::min(b.y_br, h)};
    const auto f = geom::spatial_feature(clipped, {static_cast<std::uint8_t>(rng.below(256))},
                                         static_cast<std::size_t>(w), static_cast<std::size_t>(h));
    for (double v : f) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    EXPECT_LT(f[0], f[2]);
    EXPECT_LT(f[1], f[3]);
  }
}

TEST(RelativeDepth, Examples) {
  const std::vector<DepthValue> equal(4, DepthValue{90});
  EXPECT_EQ(geom::relative_depth_matrix(equal), num::Matrix(4, 4));

  const std::vector<DepthValue> pair{{64}, {128}};
  const auto r = geom::relative_depth_matrix(pair);
  EXPECT_NEAR(r(0, 1), std::log(2.0), 1e-15);
  EXPECT_NEAR(r(1, 0), -std::log(2.0), 1e-15);
  EXPECT_NEAR(r(0, 1), 0.6931, 1e-4);

  const std::vector<DepthValue> clamp{{255}, {0}};
  const auto c = geom::relative_depth_matrix(clamp);
  EXPECT_NEAR(c(0, 1), std::log(1.0 / 255.0), 1e-15);
  EXPECT_NEAR(c(0, 1), -5.5413, 1e-4);
  EXPECT_TRUE(c.all_finite());
}

TEST(RelativeDepth, ExactlyAntisymmetricWithZeroDiagonal) {
  num::SplitMix64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<DepthValue> dv(1 + rng.below(20));
    for (auto& d : dv) d.value = static_cast<std::uint8_t>(rng.below(256));
    const auto r = geom::relative_depth_matrix(dv);
    for (std::size_t i = 0; i < dv.size(); ++i) {
      EXPECT_EQ(r(i, i), 0.0);
      for (std::size_t j = 0; j < dv.size(); ++j) EXPECT_LE(std::abs(r(i, j) + r(j, i)), 1e-12);
    }
  }
}
