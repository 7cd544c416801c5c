// Copyright 2026 The kcontrol Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "kcontrol/systems.hpp"
#include "support.hpp"

namespace kcontrol {
namespace {

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }
Vector v3(double a, double b, double c) { return (Vector(3) << a, b, c).finished(); }

TEST(DisturbanceSpecTest, RejectsInvalidParameters) {
  EXPECT_THROW(DisturbanceSpec::gaussian(0.0), Error);
  EXPECT_THROW(DisturbanceSpec::beta(0.0, 0.5, 0.1), Error);
  EXPECT_THROW(DisturbanceSpec::beta(2.0, -1.0, 0.1), Error);
  EXPECT_THROW(DisturbanceSpec::beta(2.0, 0.5, 0.0), Error);
  EXPECT_THROW(DisturbanceSpec::exponential(0.0, 0.01), Error);
  EXPECT_THROW(DisturbanceSpec::exponential(3.0, -0.01), Error);
}

TEST(SystemSpecTest, DimensionsAndValidation) {
  EXPECT_EQ(SystemSpec::double_integrator().state_dim(), 2);
  EXPECT_EQ(SystemSpec::double_integrator().control_dim(), 1);
  EXPECT_EQ(SystemSpec::nonholonomic().state_dim(), 3);
  EXPECT_EQ(SystemSpec::nonholonomic().control_dim(), 2);
  EXPECT_THROW(SystemSpec::double_integrator(0.0), Error);
  EXPECT_THROW(SystemSpec::nonholonomic(0.1, -0.1), Error);
}

TEST(StepTest, IntegratorFixedPoint) {
  const auto spec = SystemSpec::double_integrator(0.25, DisturbanceSpec::none());
  Rng rng(1);
  EXPECT_EQ(step(spec, v2(1, 0), Vector::Zero(1), rng), v2(1, 0));
}

TEST(StepTest, IntegratorDrift) {
  const auto spec = SystemSpec::double_integrator(0.25, DisturbanceSpec::none());
  Rng rng(1);
  EXPECT_EQ(step(spec, v2(0, 1), Vector::Zero(1), rng), v2(0.25, 1));
}

TEST(StepTest, IntegratorMatchesStateSpaceForm) {
  const double ts = 0.4;
  const auto spec = SystemSpec::double_integrator(ts, DisturbanceSpec::none());
  Matrix a(2, 2);
  a << 1, ts, 0, 1;
  const Vector b = v2(ts * ts / 2, ts);
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector x = testing::uniform_matrix(2, 1, -2, 2, rng).col(0);
    const Vector u = testing::uniform_matrix(1, 1, -1, 1, rng).col(0);
    EXPECT_LE((step(spec, x, u, rng) - (a * x + b * u[0])).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(StepTest, VehicleForwardMotion) {
  const auto spec = SystemSpec::nonholonomic(0.1, 0.1, DisturbanceSpec::none());
  Rng rng(3);
  const Vector next = step(spec, v3(0, 0, 0), v2(0.9, 0), rng);
  EXPECT_EQ(next[0], 0.0);
  EXPECT_NEAR(next[1], 0.1, 1e-15);
  EXPECT_EQ(next[2], 0.0);
}

TEST(StepTest, DimensionMismatchThrows) {
  Rng rng(4);
  EXPECT_THROW(step(SystemSpec::double_integrator(), Vector::Zero(3), Vector::Zero(1), rng),
               Error);
  EXPECT_THROW(step(SystemSpec::nonholonomic(), Vector::Zero(3), Vector::Zero(1), rng), Error);
}

TEST(StepTest, IntegratorLinearityNoiseOff) {
  const auto spec = SystemSpec::double_integrator(1.0, DisturbanceSpec::none());
  const Vector w = Vector::Zero(2);
  const Vector base = step_with(spec, Vector::Zero(2), Vector::Zero(1), w);
  // Dyadic inputs keep every product exact.
  Rng rng(5);
  std::uniform_int_distribution<int> ticks(-64, 64);
  for (int trial = 0; trial < 200; ++trial) {
    const Vector x1 = v2(ticks(rng) / 64.0, ticks(rng) / 64.0);
    const Vector x2 = v2(ticks(rng) / 64.0, ticks(rng) / 64.0);
    const Vector u1 = Vector::Constant(1, ticks(rng) / 64.0);
    const Vector u2 = Vector::Constant(1, ticks(rng) / 64.0);
    const Vector lhs = step_with(spec, x1 + x2, u1 + u2, w) - base;
    const Vector rhs = (step_with(spec, x1, u1, w) - base) + (step_with(spec, x2, u2, w) - base);
    EXPECT_EQ(lhs, rhs);
  }
}

TEST(StepTest, VehicleHeadingIsControlOnly) {
  const auto spec = SystemSpec::nonholonomic(0.2, 0.1, DisturbanceSpec::none());
  Rng rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    const Vector x = testing::uniform_matrix(3, 1, -3, 3, rng).col(0);
    const Vector u = v2(std::uniform_real_distribution<double>(0, 1)(rng),
                        std::uniform_real_distribution<double>(-10, 10)(rng));
    const Vector next = step(spec, x, u, rng);
    EXPECT_NEAR(next[2] - x[2], 0.2 * u[1], 1e-12);
  }
}

TEST(StepTest, NoiseOffIsReproducibleAndConsumesNothing) {
  const auto spec = SystemSpec::nonholonomic(0.2, 0.1, DisturbanceSpec::none());
  Rng a(7);
  Rng b(7);
  const Vector x = v3(0.3, -0.2, 1.0);
  const Vector u = v2(0.5, 2.0);
  EXPECT_EQ(step(spec, x, u, a), step(spec, x, u, a));
  EXPECT_EQ(a(), b());
}

TEST(WrapHeadingTest, MapsIntoHalfOpenInterval) {
  const auto spec = SystemSpec::nonholonomic();
  const double pi = std::numbers::pi;
  for (double h : {-20.0, -pi, -1.0, 0.0, 2.5, pi, 7.0, 31.4}) {
    const Vector w = wrap_heading(spec, v3(0.1, 0.2, h));
    EXPECT_GE(w[2], -pi);
    EXPECT_LT(w[2], pi);
    EXPECT_NEAR(std::sin(w[2]), std::sin(h), 1e-12);
    EXPECT_NEAR(std::cos(w[2]), std::cos(h), 1e-12);
    EXPECT_EQ(w[0], 0.1);
    EXPECT_EQ(w[1], 0.2);
  }
  const Vector x = v2(5.0, -7.0);
  EXPECT_EQ(wrap_heading(SystemSpec::double_integrator(), x), x);
}

TEST(DisturbanceTest, GaussianMeanAndVariance) {
  Rng rng(8);
  const auto spec = DisturbanceSpec::gaussian(0.01);
  const int n = 100000;
  Vector sum = Vector::Zero(2);
  Vector sq = Vector::Zero(2);
  for (int k = 0; k < n; ++k) {
    const Vector w = draw_disturbance(spec, 2, rng);
    sum += w;
    sq += w.cwiseProduct(w);
  }
  const Vector mean = sum / n;
  for (Eigen::Index c = 0; c < 2; ++c) {
    EXPECT_LE(std::abs(mean[c]), 3.0 * std::sqrt(0.01 / n));
    EXPECT_NEAR(sq[c] / n, 0.01, 0.01 * 0.03);
  }
}

TEST(DisturbanceTest, BetaMean) {
  Rng rng(9);
  const auto spec = DisturbanceSpec::beta(2.0, 0.5, 0.1);
  const int n = 100000;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    const Vector w = draw_disturbance(spec, 1, rng);
    ASSERT_GE(w[0], 0.0);
    ASSERT_LE(w[0], 0.1);
    sum += w[0];
  }
  EXPECT_NEAR(sum / n, 0.08, 0.08 * 0.01);
}

TEST(DisturbanceTest, ExponentialMean) {
  Rng rng(10);
  const auto spec = DisturbanceSpec::exponential(3.0, 0.01);
  const int n = 100000;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    const Vector w = draw_disturbance(spec, 1, rng);
    ASSERT_GE(w[0], 0.0);
    sum += w[0];
  }
  EXPECT_NEAR(sum / n, 0.01 / 3.0, 0.01 / 3.0 * 0.02);
}

TEST(DisturbanceTest, ComponentsAreIndependentDraws) {
  Rng rng(11);
  const Vector w = draw_disturbance(DisturbanceSpec::exponential(3.0, 1.0), 3, rng);
  EXPECT_NE(w[0], w[1]);
  EXPECT_NE(w[1], w[2]);
}

TEST(SampleTest, SingleTripleInsideBoxes) {
  Rng rng(12);
  const auto ranges = vehicle_ranges();
  const auto s = generate_sample(SystemSpec::nonholonomic(), ranges, 1, rng);
  ASSERT_EQ(s.size(), 1);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_GE(s.states()(0, k), ranges.state_box[k].lo);
    EXPECT_LE(s.states()(0, k), ranges.state_box[k].hi);
  }
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_GE(s.controls()(0, k), ranges.control_box[k].lo);
    EXPECT_LE(s.controls()(0, k), ranges.control_box[k].hi);
  }
}

TEST(SampleTest, SeededRunsAreIdentical) {
  Rng a(13);
  Rng b(13);
  const auto sa = generate_sample(SystemSpec::double_integrator(), integrator_ranges(), 1600, a);
  const auto sb = generate_sample(SystemSpec::double_integrator(), integrator_ranges(), 1600, b);
  EXPECT_TRUE(sa == sb);
  Rng c(14);
  const auto sc = generate_sample(SystemSpec::double_integrator(), integrator_ranges(), 1600, c);
  EXPECT_FALSE(sa == sc);
}

TEST(SampleTest, NoiseFreeSuccessorsAreExact) {
  const double ts = 0.25;
  const auto spec = SystemSpec::double_integrator(ts, DisturbanceSpec::none());
  Rng rng(15);
  const auto s = generate_sample(spec, integrator_ranges(), 200, rng);
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double x0 = s.states()(i, 0);
    const double x1 = s.states()(i, 1);
    const double u = s.controls()(i, 0);
    EXPECT_EQ(s.successors()(i, 0), x0 + ts * x1 + 0.5 * ts * ts * u);
    EXPECT_EQ(s.successors()(i, 1), x1 + ts * u);
  }
}

TEST(SampleTest, RejectsInvalidRequests) {
  Rng rng(16);
  EXPECT_THROW(generate_sample(SystemSpec::double_integrator(), integrator_ranges(), 0, rng),
               Error);
  EXPECT_THROW(generate_sample(SystemSpec::double_integrator(), vehicle_ranges(), 5, rng), Error);
  SamplingRanges bad = integrator_ranges();
  bad.state_box[0] = {1.0, 1.0};
  EXPECT_THROW(generate_sample(SystemSpec::double_integrator(), bad, 5, rng), Error);
}

TEST(TargetTrajectoryTest, Endpoints) {
  const auto pts = target_trajectory(v2(0, 1), v2(2, 3), 1);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[0], v2(0, 1));
  EXPECT_EQ(pts[1], v2(2, 3));
}

TEST(TargetTrajectoryTest, Midpoint) {
  const auto pts =
      target_trajectory(Vector::Constant(1, 0.0), Vector::Constant(1, 1.0), 2);
  ASSERT_EQ(pts.size(), 3u);
  EXPECT_EQ(pts[1][0], 0.5);
  EXPECT_EQ(pts[2][0], 1.0);
}

TEST(TargetTrajectoryTest, TrackingPath) {
  const double q = std::numbers::pi / 4;
  const auto pts = target_trajectory(v3(-1, -1, q), v3(1, 1, q), 20);
  ASSERT_EQ(pts.size(), 21u);
  EXPECT_EQ(pts.front(), v3(-1, -1, q));
  EXPECT_EQ(pts.back(), v3(1, 1, q));
  for (std::size_t t = 1; t < pts.size(); ++t) {
    EXPECT_NEAR(pts[t][0] - pts[t - 1][0], 0.1, 1e-12);
    EXPECT_NEAR(pts[t][1] - pts[t - 1][1], 0.1, 1e-12);
    EXPECT_NEAR(pts[t][2], q, 1e-15);
  }
}

TEST(TargetTrajectoryTest, RejectsZeroHorizonAndMismatch) {
  EXPECT_THROW(target_trajectory(v2(0, 0), v2(1, 1), 0), Error);
  EXPECT_THROW(target_trajectory(v2(0, 0), v3(1, 1, 1), 3), Error);
}

}  // namespace
}  // namespace kcontrol
