// Copyright 2026 The Authors.
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

#include "ocsm/infeasible_projection.hpp"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

namespace ocsm {
namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

// Points of K to test Fejer monotonicity against: all finite vertices plus
// random samples.
std::vector<Vector> probe_points(const DecisionSet& set, Rng& rng, int samples) {
  std::vector<Vector> z;
  if (auto v = set.vertices()) z = *v;
  z.push_back(set.farthest_point());
  for (int k = 0; k < samples; ++k) z.push_back(set.sample(rng));
  return z;
}

TEST(Shfw, TargetAtStartReturnsImmediately) {
  const DecisionSet set = DecisionSet::budgeted_simplex(3, 1.0);
  const Vector x = vec({0.2, 0.3, 0.1});
  const ShfwOutcome out = shfw(set, x, x, 0.01);
  EXPECT_EQ(out.x_tilde, x);
  EXPECT_EQ(out.reason, ShfwStop::kClose);
  EXPECT_EQ(out.lo_steps, 1);
}

TEST(Shfw, BoxCornerHandTrace) {
  const DecisionSet box = DecisionSet::box(vec({1, 1}));
  const ShfwOutcome out = shfw(box, vec({0, 0}), vec({-1, -1}), 1.0);
  // v = argmin <(1,1), x> = 0 and the gap <x - y, x - v> = 0; ||x - y||^2 = 2
  // <= 3 also holds, which is the stop reason recorded.
  EXPECT_EQ(out.x_tilde, vec({0, 0}));
  EXPECT_EQ(out.reason, ShfwStop::kClose);
  EXPECT_EQ(out.lo_steps, 1);
  EXPECT_EQ(box.exact_project(vec({-1, -1})), vec({0, 0}));
}

TEST(Shfw, SeparatingOutcomeCertifiesHyperplane) {
  Rng rng(1);
  const std::vector<DecisionSet> sets = {DecisionSet::budgeted_simplex(3, 1.0),
                                         DecisionSet::box(vec({1, 0.5, 0.8})),
                                         DecisionSet::nonneg_ball(3, 1.0)};
  int separating = 0;
  for (const auto& set : sets) {
    for (int k = 0; k < 100; ++k) {
      Vector y(3);
      for (Eigen::Index i = 0; i < 3; ++i) y(i) = 6.0 * uniform01(rng) - 2.0;
      const double eps = 0.01 + 0.2 * uniform01(rng);
      const ShfwOutcome out = shfw(set, set.sample(rng), y, eps);
      ASSERT_TRUE(set.contains(out.x_tilde));
      if (out.reason != ShfwStop::kSeparating) {
        EXPECT_LE((out.x_tilde - y).squaredNorm(), 3 * eps);
        continue;
      }
      ++separating;
      EXPECT_GT((out.x_tilde - y).squaredNorm(), 3 * eps);
      for (const auto& z : probe_points(set, rng, 100)) {
        EXPECT_LE((y - out.x_tilde).dot(z - out.x_tilde), eps + 1e-12);
      }
    }
  }
  EXPECT_GT(separating, 50);
}

TEST(OIp, IdentityInputsCostNothing) {
  const DecisionSet set = DecisionSet::nonneg_ball(2, 1.0);
  const Vector x = vec({0.3, 0.4});
  const IPResult r = o_ip(set, x, x, 0.1);
  EXPECT_EQ(r.x, x);
  EXPECT_EQ(r.y_tilde, x);
  EXPECT_EQ(r.lo_steps, 0);
}

TEST(OIp, RescalesFarAnchorInCloseBranch) {
  const DecisionSet set = DecisionSet::budgeted_simplex(2, 1.0);
  const Vector y0 = vec({1.5, 1.5});  // ||x0 - y0||^2 = 4.5 <= 3 * 2
  const IPResult r = o_ip(set, vec({0, 0}), y0, 2.0);
  EXPECT_EQ(r.lo_steps, 0);
  EXPECT_EQ(r.x, vec({0, 0}));
  EXPECT_TRUE(r.y_tilde.isApprox(y0 / y0.norm(), 1e-15));
}

TEST(OIp, SimplexRegression) {
  const DecisionSet set = DecisionSet::budgeted_simplex(2, 1.0);
  const Vector y0 = vec({2, 2});
  const double eps = 0.05;
  const IPResult r = o_ip(set, vec({0, 0}), y0, eps);
  EXPECT_TRUE(set.contains(r.x));
  EXPECT_LE(r.y_tilde.norm(), set.radius() + 1e-9);
  EXPECT_LE((r.x - r.y_tilde).squaredNorm(), 3 * eps + 1e-9);
  for (const Vector& z : {vec({0, 0}), vec({1, 0}), vec({0, 1}), vec({0.5, 0.5})}) {
    EXPECT_LE((r.y_tilde - z).squaredNorm(), (y0 - z).squaredNorm() + 1e-9);
  }
  // Frozen output of this implementation (regression guard).
  EXPECT_EQ(r.lo_steps, 5);
  EXPECT_NEAR(r.x(0), 0.41149857504633797, 1e-12);
  EXPECT_NEAR(r.x(1), 0.47528237002015794, 1e-12);
  EXPECT_NEAR(r.y_tilde(0), 0.70710678118654746, 1e-12);
  EXPECT_NEAR(r.y_tilde(1), 0.70710678118654746, 1e-12);
  // The exact projection is (0.5, 0.5); the feasible output is near it.
  EXPECT_LE((r.x - set.exact_project(y0)).squaredNorm(), 3 * eps + 1e-9);
}

TEST(OIp, PostconditionsOnRandomInstances) {
  Rng rng(2);
  for (int k = 0; k < 300; ++k) {
    const std::ptrdiff_t n = 2 + k % 3;
    const DecisionSet set = k % 3 == 0   ? DecisionSet::budgeted_simplex(n, 1.0 + uniform01(rng))
                            : k % 3 == 1 ? DecisionSet::box(Vector::Constant(n, 0.5 + uniform01(rng)))
                                         : DecisionSet::nonneg_ball(n, 0.5 + uniform01(rng));
    const double R = set.radius();
    const Vector x0 = set.sample(rng);
    Vector y0(n);
    for (Eigen::Index i = 0; i < n; ++i) y0(i) = R * (4.0 * uniform01(rng) - 1.5);
    const double eps = R * R * std::pow(10.0, -2.0 + 2.0 * uniform01(rng));

    const IPResult r = o_ip(set, x0, y0, eps);
    ASSERT_TRUE(set.contains(r.x, 1e-9));
    ASSERT_LE(r.y_tilde.norm(), R + 1e-9);
    ASSERT_LE((r.x - r.y_tilde).squaredNorm(), 3 * eps + 1e-9);
    ASSERT_LE(static_cast<double>(r.lo_steps), lo_budget(R, eps, (x0 - y0).squaredNorm()));
    for (const auto& z : probe_points(set, rng, 100)) {
      ASSERT_LE((r.y_tilde - z).squaredNorm(), (y0 - z).squaredNorm() + 1e-9);
    }
  }
}

TEST(OIp, AnchorChainIsFejerMonotone) {
  Rng rng(3);
  int steps_checked = 0;
  for (int k = 0; k < 100; ++k) {
    const DecisionSet set = DecisionSet::budgeted_simplex(3, 1.0);
    Vector y0(3);
    for (Eigen::Index i = 0; i < 3; ++i) y0(i) = 3.0 * uniform01(rng) - 1.0;
    IpTrace trace;
    o_ip(set, set.sample(rng), y0, 0.01, &trace);
    const auto probes = probe_points(set, rng, 100);
    for (std::size_t i = 0; i + 1 < trace.anchors.size(); ++i) {
      if (!trace.separated[i]) continue;
      ++steps_checked;
      for (const auto& z : probes) {
        ASSERT_LE((trace.anchors[i + 1] - z).squaredNorm(),
                  (trace.anchors[i] - z).squaredNorm() + 1e-12);
      }
    }
  }
  EXPECT_GT(steps_checked, 0);
}

TEST(OIp, LargeToleranceCostsOneStep) {
  // eps >= 13.5 R^2 makes the literal budget nonpositive; after rescaling the
  // anchor is within 2R of x0, so SHFW stops at its first check.
  const DecisionSet set = DecisionSet::nonneg_ball(2, 1.0);
  const double eps = 20.0;
  EXPECT_LE(lo_budget(1.0, eps, 1e4), 0.0);
  const IPResult r = o_ip(set, vec({0, 0}), vec({100, 0}), eps);
  EXPECT_EQ(r.lo_steps, 1);
  EXPECT_TRUE(r.y_tilde.isApprox(vec({1, 0})));
}

TEST(OIp, BudgetFormula) {
  // ceil(27 / 1 - 2) * max(1, 4 * 3 / 4 + 1) = 25 * 4
  EXPECT_DOUBLE_EQ(lo_budget(1.0, 1.0, 4.0), 100.0);
  EXPECT_DOUBLE_EQ(lo_budget(1.0, 1.0, 0.5), 25.0);
}

TEST(OIp, RejectsNonpositiveTolerance) {
  const DecisionSet set = DecisionSet::nonneg_ball(2, 1.0);
  EXPECT_THROW(o_ip(set, vec({0, 0}), vec({1, 1}), 0.0), std::invalid_argument);
  EXPECT_THROW(shfw(set, vec({0, 0}), vec({1, 1}), -1.0), std::invalid_argument);
}

}  // namespace
}  // namespace ocsm
