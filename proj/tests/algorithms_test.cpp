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

#include "ocsm/algorithms.hpp"

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "ocsm/harness.hpp"

namespace ocsm {
namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Adversary quadratic_adversary(const DecisionSet& set, std::int64_t T, std::uint64_t seed,
                              double sigma = 0.1) {
  AdversarySpec spec;
  spec.n = set.dim();
  spec.sigma = sigma;
  return Adversary(spec, set, T, seed);
}

TEST(TheoremParams, LargeHorizon) {
  const PobgaParams p = pobga_params_from_theorem(65536, 1.0, 1.0);
  EXPECT_EQ(p.K, 256);
  EXPECT_DOUBLE_EQ(p.eps, 1.58203125);
  EXPECT_NEAR(p.eta, 0.0077245, 5e-7);
  // Independent arithmetic: 20 / (1 - 1/e) / 4096.
  EXPECT_NEAR(p.eta, 20.0 / (1.0 - std::exp(-1.0)) / 4096.0, 1e-15);
}

TEST(TheoremParams, SmallHorizon) {
  const PobgaParams p = pobga_params_from_theorem(256, 1.0, 1.0);
  EXPECT_EQ(p.K, 16);
  EXPECT_DOUBLE_EQ(p.eps, 25.3125);
  EXPECT_NEAR(p.eta, 0.494368, 5e-7);
}

TEST(TheoremParams, Homogeneity) {
  const PobgaParams a = pobga_params_from_theorem(100, 1.0, 1.0);
  const PobgaParams b = pobga_params_from_theorem(100, 2.0, 4.0);
  EXPECT_EQ(a.K, 10);
  EXPECT_NEAR(b.eta, a.eta / 2.0, 1e-15);
  EXPECT_NEAR(b.eps, a.eps * 4.0, 1e-12);
}

TEST(TheoremParams, RejectsNonSquareHorizon) {
  EXPECT_THROW(pobga_params_from_theorem(200, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(pobga_params_from_theorem(0, 1.0, 1.0), std::invalid_argument);
  EXPECT_EQ(exact_sqrt(4611686014132420609LL), 2147483647);
  EXPECT_EQ(exact_sqrt(99), -1);
}

TEST(TheoremParams, ManualParamsRequireDivisibility) {
  PobgaParams p{12, 5, 0.1, 0.1};
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p.K = 4;
  EXPECT_NO_THROW(p.validate());
  EXPECT_EQ(p.blocks(), 3);
}

TEST(Pobga, SingleBlockPlaysOrigin) {
  const DecisionSet set = DecisionSet::budgeted_simplex(2, 1.0);
  const Adversary adv = quadratic_adversary(set, 16, 1);
  const RunRecord rec = pobga_run(adv, set, PobgaParams{16, 16, 0.1, 0.01}, adv.noise(), 1);
  EXPECT_EQ(rec.totals.oip_calls, 1);
  EXPECT_EQ(rec.totals.grad_evals, 16);
  for (std::int64_t t = 0; t < 16; ++t) EXPECT_TRUE(rec.decision_at(t).isZero(0.0));
  EXPECT_EQ(rec.total_reward(), 0.0);
}

TEST(Pobga, ZeroFunctionsStayAtOrigin) {
  const DecisionSet set = DecisionSet::box(vec({1, 1}));
  const Adversary adv(RewardFunction(QuadraticReward::zero(2)), NoiseModel{0.0}, set, 64);
  const RunRecord rec = pobga_run(adv, set, PobgaParams{64, 8, 0.5, 0.01}, adv.noise(), 3);
  for (const auto& x : rec.decisions) EXPECT_TRUE(x.isZero(0.0));
  for (const auto& y : rec.anchors) EXPECT_TRUE(y.isZero(0.0));
  EXPECT_EQ(rec.total_reward(), 0.0);
  EXPECT_EQ(rec.totals.lo_steps, 0);
}

TEST(Pobga, CountersUnderTheoremParams) {
  const DecisionSet set = DecisionSet::budgeted_simplex(2, 1.0);
  const Adversary adv = quadratic_adversary(set, 256, 7);
  const PobgaParams p = pobga_params_from_theorem(256, set.radius(), adv.bound().G);
  const RunRecord rec = pobga_run(adv, set, p, adv.noise(), 7);
  EXPECT_EQ(rec.totals.grad_evals, 256);
  EXPECT_EQ(rec.totals.oip_calls, 16);
  EXPECT_EQ(rec.totals.projections, 0);
  EXPECT_LE(rec.totals.lo_steps, 256);
  ASSERT_EQ(rec.cumulative.size(), 256u);
  for (std::size_t t = 1; t < rec.cumulative.size(); ++t) {
    EXPECT_GE(rec.cumulative[t].grad_evals, rec.cumulative[t - 1].grad_evals);
    EXPECT_GE(rec.cumulative[t].lo_steps, rec.cumulative[t - 1].lo_steps);
  }
  EXPECT_EQ(rec.cumulative.back(), rec.totals);
}

TEST(Pobga, BlockInvariantsAndStepBound) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const DecisionSet set = seed == 2 ? DecisionSet::nonneg_ball(3, 1.0)
                                      : DecisionSet::budgeted_simplex(3, 1.5);
    const Adversary adv = quadratic_adversary(set, 400, seed, 0.3);
    const double G = adv.bound().G;
    const double R = set.radius();
    // Manual parameters that make the oracle do real work.
    const PobgaParams p{400, 20, 0.5 * R / G, 0.002 * R * R};
    int blocks = 0;
    const RunRecord rec = pobga_run(adv, set, p, adv.noise(), seed, [&](const BlockEvent& e) {
      ++blocks;
      EXPECT_TRUE(set.contains(*e.x, 1e-9));
      EXPECT_TRUE(set.contains(*e.next_x, 1e-9));
      EXPECT_LE(e.next_anchor->norm(), R + 1e-9);
      EXPECT_LE((*e.next_x - *e.next_anchor).squaredNorm(), 3 * p.eps + 1e-9);
      const double bound9 = 6 * p.eps +
                            2 * kBoostFactor * kBoostFactor * p.K * p.K * p.eta * p.eta * G * G;
      EXPECT_LE((*e.target - *e.x).squaredNorm(), bound9 + 1e-9);
    });
    EXPECT_EQ(blocks, 20);
    EXPECT_GT(rec.totals.lo_steps, 20);
    EXPECT_TRUE(rec.decisions.front().isZero(0.0));
    EXPECT_TRUE(rec.anchors.front().isZero(0.0));
  }
}

TEST(Pobga, DeterministicPerSeed) {
  const DecisionSet set = DecisionSet::budgeted_simplex(2, 1.0);
  const Adversary adv = quadratic_adversary(set, 100, 5);
  const PobgaParams p{100, 10, 0.2, 0.01};
  const RunRecord a = pobga_run(adv, set, p, adv.noise(), 11);
  const RunRecord b = pobga_run(adv, set, p, adv.noise(), 11);
  const RunRecord c = pobga_run(adv, set, p, adv.noise(), 12);
  EXPECT_TRUE(a == b);
  EXPECT_FALSE(a == c);
}

TEST(Pobga, RewardsUseExactValues) {
  const DecisionSet set = DecisionSet::box(vec({1, 1}));
  const Adversary adv = quadratic_adversary(set, 64, 9, 0.5);
  const RunRecord rec = pobga_run(adv, set, PobgaParams{64, 8, 0.3, 0.01}, adv.noise(), 9);
  for (std::int64_t t = 0; t < 64; ++t) {
    EXPECT_EQ(rec.rewards[t], adv(t).eval(rec.decision_at(t)));
  }
}

TEST(Oga, ZeroFunctionsStay) {
  const DecisionSet set = DecisionSet::box(vec({1, 1}));
  const Adversary adv(RewardFunction(QuadraticReward::zero(2)), NoiseModel{0.0}, set, 10);
  const RunRecord rec = oga_run(adv, set, 10, 0.1, adv.noise(), 0);
  for (const auto& x : rec.decisions) EXPECT_TRUE(x.isZero(0.0));
  EXPECT_EQ(rec.totals.projections, 10);
  EXPECT_EQ(rec.totals.grad_evals, 10);
}

TEST(Oga, SingleInteriorStep) {
  const DecisionSet set = DecisionSet::box(vec({1, 1}));
  const Adversary adv(RewardFunction(QuadraticReward::linear(vec({1, 1}))), NoiseModel{0.0}, set, 2);
  const RunRecord rec = oga_run(adv, set, 2, 0.1, adv.noise(), 0);
  EXPECT_TRUE(rec.decisions[1].isApprox(vec({0.1, 0.1}), 1e-15));
}

TEST(Oga, LargeStepClamps) {
  const DecisionSet set = DecisionSet::box(vec({1, 1}));
  const Adversary adv(RewardFunction(QuadraticReward::linear(vec({1, 1}))), NoiseModel{0.0}, set, 2);
  const RunRecord rec = oga_run(adv, set, 2, 1e3, adv.noise(), 0);
  EXPECT_EQ(rec.decisions[1], vec({1, 1}));
}

TEST(Obga, ZeroFunctionsStay) {
  const DecisionSet set = DecisionSet::box(vec({1, 1}));
  const Adversary adv(RewardFunction(QuadraticReward::zero(2)), NoiseModel{0.0}, set, 10);
  const RunRecord rec = obga_run(adv, set, 10, 0.1, adv.noise(), 0);
  for (const auto& x : rec.decisions) EXPECT_TRUE(x.isZero(0.0));
}

TEST(Obga, SingleInteriorStepCarriesBoostFactor) {
  // A linear reward has a constant gradient, so the boost draw does not matter:
  // x_2 = 0.1 * (1 - 1/e) * (1, 1).
  const DecisionSet set = DecisionSet::box(vec({1, 1}));
  const Adversary adv(RewardFunction(QuadraticReward::linear(vec({1, 1}))), NoiseModel{0.0}, set, 2);
  const RunRecord rec = obga_run(adv, set, 2, 0.1, adv.noise(), 0);
  const double step = 0.1 * (1.0 - 1.0 / std::numbers::e);
  EXPECT_NEAR(rec.decisions[1](0), step, 1e-15);
  EXPECT_NEAR(rec.decisions[1](1), step, 1e-15);
}

TEST(Obga, LargeStepClamps) {
  const DecisionSet set = DecisionSet::box(vec({1, 1}));
  const Adversary adv(RewardFunction(QuadraticReward::linear(vec({1, 1}))), NoiseModel{0.0}, set, 2);
  const RunRecord rec = obga_run(adv, set, 2, 1e3, adv.noise(), 0);
  EXPECT_EQ(rec.decisions[1], vec({1, 1}));
}

TEST(Baselines, FeasibleAndDeterministic) {
  const DecisionSet set = DecisionSet::budgeted_simplex(3, 1.0);
  const Adversary adv = quadratic_adversary(set, 200, 4, 0.5);
  for (int which = 0; which < 2; ++which) {
    auto run = [&](std::uint64_t seed) {
      return which == 0 ? oga_run(adv, set, 200, 0.05, adv.noise(), seed)
                        : obga_run(adv, set, 200, 0.05, adv.noise(), seed);
    };
    const RunRecord a = run(3);
    EXPECT_TRUE(a == run(3));
    for (const auto& x : a.decisions) EXPECT_TRUE(set.contains(x, 1e-9));
  }
}

}  // namespace
}  // namespace ocsm
