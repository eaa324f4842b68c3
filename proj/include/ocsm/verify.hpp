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

// Randomized property suites over the library's oracles. Each suite returns
// one result per property; all randomness is derived from a single seed so a
// report is reproducible byte for byte.

#ifndef OCSM_VERIFY_HPP_
#define OCSM_VERIFY_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "ocsm/config.hpp"
#include "ocsm/core.hpp"
#include "ocsm/decentralized.hpp"
#include "ocsm/functions.hpp"
#include "ocsm/harness.hpp"
#include "ocsm/infeasible_projection.hpp"
#include "ocsm/sets.hpp"

namespace ocsm {

struct PropertyResult {
  std::string suite;
  std::string property;
  bool pass = true;
  std::int64_t checks = 0;
  std::int64_t failures = 0;
  double worst = 0.0;  // largest violation margin (or statistic) observed
  std::string note;
};

struct VerifyReport {
  std::vector<PropertyResult> results;

  bool all_pass() const {
    return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass; });
  }

  std::string text() const {
    std::string out;
    char buf[512];
    for (const auto& r : results) {
      std::snprintf(buf, sizeof(buf), "%-4s %-20s %-22s checks=%-8lld failures=%-6lld worst=%.6e%s%s\n",
                    r.pass ? "PASS" : "FAIL", r.suite.c_str(), r.property.c_str(),
                    static_cast<long long>(r.checks), static_cast<long long>(r.failures), r.worst,
                    r.note.empty() ? "" : "  ", r.note.c_str());
      out += buf;
    }
    std::snprintf(buf, sizeof(buf), "%s: %zu properties, %zu failed\n",
                  all_pass() ? "OK" : "FAILED", results.size(),
                  static_cast<std::size_t>(std::count_if(results.begin(), results.end(),
                                                         [](const auto& r) { return !r.pass; })));
    out += buf;
    return out;
  }

  Json json() const {
    Json arr = Json::array();
    for (const auto& r : results) {
      arr.push_back({{"suite", r.suite},
                     {"property", r.property},
                     {"pass", r.pass},
                     {"checks", r.checks},
                     {"failures", r.failures},
                     {"worst", r.worst},
                     {"note", r.note}});
    }
    return {{"pass", all_pass()}, {"results", arr}};
  }
};

// Signature of the oracle under test, so that a deliberately broken one can be
// checked to fail.
using OipOracle = std::function<IPResult(const DecisionSet&, const Vector&, const Vector&, double)>;

inline OipOracle default_oip_oracle() {
  return [](const DecisionSet& set, const Vector& x0, const Vector& y0, double eps) {
    return o_ip(set, x0, y0, eps);
  };
}

namespace detail {

// Tracks one property: record(margin) counts a failure when margin > 0.
struct Tally {
  PropertyResult r;
  Tally(std::string suite, std::string property) {
    r.suite = std::move(suite);
    r.property = std::move(property);
    r.worst = -std::numeric_limits<double>::infinity();
  }
  void record(double margin) {
    ++r.checks;
    r.worst = std::max(r.worst, margin);
    if (!(margin <= 0.0)) ++r.failures;
  }
  PropertyResult done(std::string note = {}) {
    r.pass = r.failures == 0 && r.checks > 0;
    if (r.checks == 0) r.worst = 0.0;
    r.note = std::move(note);
    return r;
  }
};

inline DecisionSet random_set(Rng& rng, int k) {
  const std::ptrdiff_t n = 2 + k % 3;
  switch ((k / 3) % 4) {
    case 0:
      return DecisionSet::budgeted_simplex(n, 0.5 + 1.5 * uniform01(rng));
    case 1: {
      Vector cap(n);
      for (Eigen::Index i = 0; i < n; ++i) cap(i) = 0.2 + 0.8 * uniform01(rng);
      return DecisionSet::budgeted_simplex(0.3 + 0.5 * cap.sum() * uniform01(rng), cap);
    }
    case 2: {
      Vector u(n);
      for (Eigen::Index i = 0; i < n; ++i) u(i) = 0.3 + 1.2 * uniform01(rng);
      return DecisionSet::box(u);
    }
    default:
      return DecisionSet::nonneg_ball(n, 0.5 + 1.5 * uniform01(rng));
  }
}

inline RewardFunction random_instance(Rng& rng, int k, const DecisionSet& set) {
  if (k % 2 == 0 || set.coordinatewise_max().maxCoeff() > 1.0) {
    return RewardFunction(random_quadratic(set.dim(), set.coordinatewise_max(),
                                           0.5 + uniform01(rng), 0.5 + uniform01(rng), rng));
  }
  return RewardFunction(random_coverage(set.dim(), 3, rng));
}

}  // namespace detail

// Contract of the infeasible projection oracle on randomized inputs across
// all set variants: budget, feasibility, anchor norm, closeness, Fejer.
// eps is drawn log-uniformly in [1e-3, 5] R^2, where the budget is positive.
inline std::vector<PropertyResult> verify_oip_contract(const VerifySpec& spec,
                                                       const OipOracle& oracle) {
  Rng rng(derive_seed(spec.seed, "oip_contract", 0));
  detail::Tally budget("oip_contract", "lo_budget");
  detail::Tally feasible("oip_contract", "feasibility");
  detail::Tally anchor("oip_contract", "anchor_norm");
  detail::Tally close("oip_contract", "closeness");
  detail::Tally fejer("oip_contract", "fejer");
  std::int64_t steps = 0, violations = 0;
  for (int k = 0; k < spec.oip_calls; ++k) {
    const DecisionSet set = detail::random_set(rng, k);
    const auto n = set.dim();
    const double R = set.radius();
    const Vector x0 = set.sample(rng);
    Vector y0(n);
    const double spread = uniform01(rng) < 0.5 ? 1.0 : 3.0;
    for (Eigen::Index i = 0; i < n; ++i) y0(i) = R * spread * (2.0 * uniform01(rng) - 0.5);
    const double eps = R * R * 1e-3 * std::pow(5e3, uniform01(rng));

    IPResult r;
    try {
      r = oracle(set, x0, y0, eps);
    } catch (const ContractViolation&) {
      ++violations;
      budget.record(1.0);
      continue;
    }
    steps += r.lo_steps;
    // The early-return branch costs nothing, so a zero allowance is exact there.
    const double allowance = std::max(lo_budget(R, eps, (x0 - y0).squaredNorm()), 0.0);
    budget.record(static_cast<double>(r.lo_steps) - allowance);
    feasible.record(set.contains(r.x, 1e-9) ? 0.0 : 1.0);
    anchor.record(r.y_tilde.norm() - R - 1e-9);
    close.record((r.x - r.y_tilde).squaredNorm() - 3 * eps - 1e-9);
    std::vector<Vector> probes;
    if (auto v = set.vertices()) probes = *v;
    probes.push_back(set.farthest_point());
    for (int j = 0; j < spec.fejer_points; ++j) probes.push_back(set.sample(rng));
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& z : probes) {
      worst = std::max(worst, (r.y_tilde - z).squaredNorm() - (y0 - z).squaredNorm() - 1e-9);
    }
    fejer.record(worst);
  }
  return {budget.done(std::to_string(steps) + " LO steps" +
                      (violations ? ", " + std::to_string(violations) + " budget throws" : "")),
          feasible.done(), anchor.done(), close.done(), fejer.done()};
}

// Monte Carlo mean of the boosted stochastic gradient against the quadrature
// value of the surrogate gradient, per coordinate within 3 standard errors.
inline std::vector<PropertyResult> verify_unbiasedness(const VerifySpec& spec) {
  Rng rng(derive_seed(spec.seed, "unbiasedness", 0));
  detail::Tally t("unbiasedness", "mean_within_3se");
  const NoiseModel noise{0.1};
  for (int k = 0; k < spec.unbiased_points; ++k) {
    const DecisionSet set = DecisionSet::budgeted_simplex(2 + k % 2, 1.0);
    const RewardFunction f = detail::random_instance(rng, k, set);
    const Vector x = set.sample(rng);
    const Vector ref = boost_grad_quadrature(f, x, 64);
    Vector sum = Vector::Zero(x.size()), sum2 = Vector::Zero(x.size());
    Rng draws(derive_seed(spec.seed, "unbiasedness-draws", static_cast<std::uint64_t>(k)));
    for (int d = 0; d < spec.unbiased_draws; ++d) {
      const Vector g = boosted_stochastic_grad(f, x, noise, draws);
      sum += g;
      sum2 += g.cwiseProduct(g);
    }
    const double m = spec.unbiased_draws;
    const Vector mean = sum / m;
    const Vector var = ((sum2 / m) - mean.cwiseProduct(mean)) * (m / (m - 1.0));
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double se = std::sqrt(std::max(var(i), 0.0) / m);
      // Margin in units of standard errors beyond 3.
      const double z = se > 0.0 ? std::abs(mean(i) - ref(i)) / se : (mean(i) == ref(i) ? 0.0 : 1e9);
      t.record(z - 3.0);
    }
  }
  PropertyResult r = t.done();
  r.note = "worst is (|z| - 3) over coordinates";
  return {r};
}

// <y - x, grad F(x)> >= (1 - 1/e) f(y) - f(x) with 1000-node quadrature.
inline std::vector<PropertyResult> verify_boosting_inequality(const VerifySpec& spec) {
  Rng rng(derive_seed(spec.seed, "boosting_inequality", 0));
  detail::Tally t("boosting_inequality", "lower_bound");
  for (int k = 0; k < spec.boosting_instances; ++k) {
    const DecisionSet set = k % 3 == 2 ? DecisionSet::box(Vector::Ones(3))
                                       : DecisionSet::budgeted_simplex(2 + k % 2, 1.0);
    const RewardFunction f = detail::random_instance(rng, k, set);
    for (int p = 0; p < spec.boosting_pairs; ++p) {
      const Vector x = set.sample(rng), y = set.sample(rng);
      const Vector gF = boost_grad_quadrature(f, x, 1000);
      const double lhs = (y - x).dot(gF);
      const double rhs = kBoostFactor * f.eval(y) - f.eval(x);
      t.record(rhs - lhs - 1e-8);
    }
  }
  return {t.done()};
}

// Metropolis matrices across topologies: symmetry, stochasticity, support,
// beta < 1, and the closed-form cycle-4 spectrum.
inline std::vector<PropertyResult> verify_weight_matrix(const VerifySpec&) {
  detail::Tally sym("weight_matrix", "symmetric");
  detail::Tally stoch("weight_matrix", "doubly_stochastic");
  detail::Tally support("weight_matrix", "support");
  detail::Tally beta("weight_matrix", "beta_below_one");
  detail::Tally cyc("weight_matrix", "cycle4_beta");
  for (const std::string kind : {"complete", "cycle", "path", "star", "grid"}) {
    for (int N = 2; N <= 16; ++N) {
      if (kind == "grid" && exact_sqrt(N) < 0) continue;
      if (kind == "cycle" && N < 3) continue;
      const Graph g = build_topology(kind, N);
      const Matrix A = metropolis_weights(g);
      sym.record((A - A.transpose()).cwiseAbs().maxCoeff());
      double dev = 0.0;
      for (int i = 0; i < N; ++i) {
        dev = std::max({dev, std::abs(A.row(i).sum() - 1.0), std::abs(A.col(i).sum() - 1.0)});
      }
      stoch.record(dev - 1e-12);
      double bad = 0.0;
      for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
          if (A(i, j) < 0.0) bad = 1.0;
          if (i != j && !g.has_edge(i, j) && A(i, j) != 0.0) bad = 1.0;
        }
      }
      support.record(bad);
      beta.record(spectral_beta(A) - (1.0 - 1e-12));
    }
  }
  cyc.record(std::abs(spectral_beta(metropolis_weights(build_topology("cycle", 4))) - 1.0 / 3.0) -
             1e-10);
  return {sym.done(), stoch.done(), support.done(), beta.done(), cyc.done()};
}

// Analytic gradients against central differences, and exact inverse-CDF
// endpoints of the boosting variable.
inline std::vector<PropertyResult> verify_gradient_check(const VerifySpec& spec) {
  Rng rng(derive_seed(spec.seed, "gradient_check", 0));
  detail::Tally fd("gradient_check", "finite_difference");
  detail::Tally ends("gradient_check", "inverse_cdf_endpoints");
  const double h = 1e-5;
  for (int k = 0; k < 100; ++k) {
    const DecisionSet set = DecisionSet::box(Vector::Constant(2 + k % 3, 1.0));
    const RewardFunction f = detail::random_instance(rng, k, set);
    // Keep x away from the box faces so the stencil stays inside.
    Vector x = set.sample(rng) * 0.9 + Vector::Constant(set.dim(), 0.05);
    const Vector g = f.grad(x);
    Vector num(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      Vector xp = x, xm = x;
      xp(i) += h;
      xm(i) -= h;
      num(i) = (f.eval(xp) - f.eval(xm)) / (2 * h);
    }
    const double rel = (num - g).norm() / std::max(1.0, g.norm());
    fd.record(rel - 1e-5);
  }
  ends.record(boost_z_from_uniform(0.0) == 0.0 ? 0.0 : 1.0);
  ends.record(boost_z_from_uniform(1.0) == 1.0 ? 0.0 : 1.0);
  return {fd.done(), ends.done()};
}

inline VerifyReport run_verify(const VerifySpec& spec, const OipOracle& oracle = default_oip_oracle()) {
  VerifyReport rep;
  auto add = [&](std::vector<PropertyResult> rs) {
    for (auto& r : rs) rep.results.push_back(std::move(r));
  };
  for (const auto& s : spec.suites) {
    if (s == "oip_contract") add(verify_oip_contract(spec, oracle));
    else if (s == "unbiasedness") add(verify_unbiasedness(spec));
    else if (s == "boosting_inequality") add(verify_boosting_inequality(spec));
    else if (s == "weight_matrix") add(verify_weight_matrix(spec));
    else if (s == "gradient_check") add(verify_gradient_check(spec));
    else throw std::invalid_argument("unknown verify suite '" + s + "'");
  }
  return rep;
}

}  // namespace ocsm

#endif  // OCSM_VERIFY_HPP_
