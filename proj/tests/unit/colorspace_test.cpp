#include "tristat/colorspace.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"
#include "tristat/error.hpp"

namespace tristat {
namespace {

TEST(Tristimulus, RejectsNegativeAndNonFinite) {
  EXPECT_THROW(Tristimulus(-1.0, 0.0, 0.0), ValidationError);
  EXPECT_THROW(Tristimulus(0.0, std::nan(""), 0.0), ValidationError);
  EXPECT_THROW(Tristimulus(0.0, 0.0, INFINITY), ValidationError);
  EXPECT_NO_THROW(Tristimulus(0.0, 0.0, 0.0));
}

TEST(Tristimulus, ClampCountsComponents) {
  int clamped = -1;
  const Tristimulus t = Tristimulus::ClampFromVector(Vec3(-0.1, 2.0, -3.0), &clamped);
  EXPECT_EQ(clamped, 2);
  EXPECT_EQ(t, Tristimulus(0.0, 2.0, 0.0));
}

TEST(Chromaticity, Examples) {
  const auto equal = chromaticity({1, 1, 1});
  EXPECT_DOUBLE_EQ(equal.x, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(equal.y, 1.0 / 3.0);

  const auto red = chromaticity({1, 0, 0});
  EXPECT_EQ(red.x, 1.0);
  EXPECT_EQ(red.y, 0.0);

  const auto c = chromaticity({2, 3, 5});
  EXPECT_NEAR(c.x, 0.2, 1e-15);
  EXPECT_NEAR(c.y, 0.3, 1e-15);
}

TEST(Chromaticity, ZeroSumIsDegenerate) {
  EXPECT_THROW(chromaticity({0, 0, 0}), NumericalError);
  EXPECT_THROW(scale_invariance_check({0, 0, 0}, 2.0), NumericalError);
}

TEST(Chromaticity, ScaleInvarianceExamples) {
  EXPECT_TRUE(scale_invariance_check({1, 2, 3}, 7.0));
  EXPECT_TRUE(scale_invariance_check({0.5, 0.5, 0.5}, 1.0));
  EXPECT_TRUE(scale_invariance_check({3, 1, 4}, 1e-6));
  EXPECT_THROW(scale_invariance_check({1, 2, 3}, 0.0), ValidationError);
}

TEST(ChromaticityProperty, ScaleInvariantAndSumsToOne) {
  testing::Gen gen(11);
  for (int i = 0; i < 2000; ++i) {
    const Tristimulus c = gen.Color();
    const double s = gen.LogUniform(1e-6, 1e6);
    ASSERT_TRUE(scale_invariance_check(c, s)) << i;
    const auto xy = chromaticity(c);
    const double z = c.Z() / c.Sum();
    ASSERT_NEAR(xy.x + xy.y + z, 1.0, 1e-15);
  }
}

TEST(Lab, WhiteAndBlack) {
  const Tristimulus white(95.047, 100.0, 108.883);
  const LabColor w = xyz_to_lab(white, white);
  EXPECT_DOUBLE_EQ(w.L, 100.0);
  EXPECT_DOUBLE_EQ(w.a, 0.0);
  EXPECT_DOUBLE_EQ(w.b, 0.0);

  const LabColor k = xyz_to_lab({0, 0, 0}, white);
  EXPECT_NEAR(k.L, 0.0, 1e-12);
  EXPECT_NEAR(k.a, 0.0, 1e-12);
  EXPECT_NEAR(k.b, 0.0, 1e-12);
}

TEST(Lab, EighthOfWhiteIsMidGray) {
  // 1/8 > (6/29)^3, so the cube-root branch applies: L* = 116 * 0.5 - 16 = 42.
  const Tristimulus white(80.0, 90.0, 70.0);
  const LabColor lab = xyz_to_lab(white.Scaled(1.0 / 8.0), white);
  EXPECT_NEAR(lab.L, 42.0, 1e-12);
  EXPECT_NEAR(lab.a, 0.0, 1e-12);
  EXPECT_NEAR(lab.b, 0.0, 1e-12);
}

TEST(Lab, PublishedSrgbRedValue) {
  // sRGB red under D65: L*a*b* = (53.24, 80.09, 67.20) in common references.
  const Tristimulus white(95.047, 100.0, 108.883);
  const LabColor red = xyz_to_lab({41.2456, 21.2673, 1.9334}, white);
  EXPECT_NEAR(red.L, 53.24, 0.01);
  EXPECT_NEAR(red.a, 80.09, 0.02);
  EXPECT_NEAR(red.b, 67.20, 0.02);
}

TEST(Lab, LinearBranchBelowThreshold) {
  const Tristimulus white(1.0, 1.0, 1.0);
  const double t = 0.001;  // below (6/29)^3
  const LabColor lab = xyz_to_lab({t, t, t}, white);
  EXPECT_NEAR(lab.L, 116.0 * ((24389.0 / 27.0) * t + 16.0) / 116.0 - 16.0, 1e-12);
}

TEST(Lab, RejectsDegenerateWhite) {
  EXPECT_THROW(xyz_to_lab({1, 1, 1}, {1, 0, 1}), ValidationError);
}

TEST(LabProperty, RoundTrip) {
  testing::Gen gen(12);
  for (int i = 0; i < 2000; ++i) {
    const Tristimulus white = gen.Color();
    const Tristimulus c(white.X() * gen.Uniform(0.0005, 1.2), white.Y() * gen.Uniform(0.0005, 1.2),
                        white.Z() * gen.Uniform(0.0005, 1.2));
    const Vec3 back = lab_to_xyz(xyz_to_lab(c, white));
    ASSERT_LE((back - c.vec()).norm() / c.vec().norm(), 1e-9) << i;
    const LabColor w = xyz_to_lab(white, white);
    ASSERT_NEAR(w.L, 100.0, 1e-12);
    ASSERT_NEAR(w.a, 0.0, 1e-12);
    ASSERT_NEAR(w.b, 0.0, 1e-12);
  }
}

TEST(DeltaE76, Examples) {
  const Tristimulus white(1, 1, 1);
  const LabColor p{50, 0, 0, white};
  EXPECT_EQ(delta_e76(p, p), 0.0);
  EXPECT_DOUBLE_EQ(delta_e76(p, {53, 4, 0, white}), 5.0);
  EXPECT_DOUBLE_EQ(delta_e76({60, 10, -10, white}, {58, 12, -7, white}), std::sqrt(17.0));
}

TEST(DeltaE76, MismatchedWhites) {
  const LabColor p{50, 0, 0, Tristimulus(1, 1, 1)};
  const LabColor q{50, 0, 0, Tristimulus(1, 1, 1.001)};
  EXPECT_THROW(delta_e76(p, q), ValidationError);
  const LabColor r{50, 0, 0, Tristimulus(1, 1, 1 + 1e-12)};
  EXPECT_NO_THROW(delta_e76(p, r));
}

TEST(DeltaE76Property, MetricAxioms) {
  testing::Gen gen(13);
  const Tristimulus white(95.047, 100.0, 108.883);
  auto lab = [&] {
    return LabColor{gen.Uniform(0, 100), gen.Uniform(-120, 120), gen.Uniform(-120, 120), white};
  };
  for (int i = 0; i < 5000; ++i) {
    const LabColor p = lab(), q = lab(), r = lab();
    const double pq = delta_e76(p, q);
    ASSERT_GE(pq, 0.0);
    ASSERT_EQ(pq, delta_e76(q, p));
    ASSERT_EQ(delta_e76(p, p), 0.0);
    ASSERT_GT(pq, 0.0);  // distinct with probability 1
    ASSERT_LE(pq, delta_e76(p, r) + delta_e76(r, q) + 1e-12);
  }
}

}  // namespace
}  // namespace tristat
