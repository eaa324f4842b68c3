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

// Online learners: the projection-free blocked boosting learner (POBGA) and
// the projection-based baselines OGA and OBGA.

#ifndef OCSM_ALGORITHMS_HPP_
#define OCSM_ALGORITHMS_HPP_

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>

#include "ocsm/core.hpp"
#include "ocsm/functions.hpp"
#include "ocsm/infeasible_projection.hpp"
#include "ocsm/run_record.hpp"
#include "ocsm/sets.hpp"

namespace ocsm {

struct PobgaParams {
  std::int64_t T = 0;
  std::int64_t K = 1;    // block size in rounds
  double eta = 0.0;      // step size
  double eps = 0.0;      // oracle tolerance

  void validate() const {
    require(T > 0, "PobgaParams: T must be positive");
    require(K > 0, "PobgaParams: K must be positive");
    require(T % K == 0, "PobgaParams: K must divide T");
    require(eta > 0.0, "PobgaParams: eta must be positive");
    require(eps > 0.0, "PobgaParams: eps must be positive");
  }
  std::int64_t blocks() const { return T / K; }
};

// Exact integer square root, or -1 if T is not a perfect square.
inline std::int64_t exact_sqrt(std::int64_t T) {
  if (T < 0) return -1;
  auto r = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(T))));
  while (r * r > T) --r;
  while ((r + 1) * (r + 1) <= T) ++r;
  return r * r == T ? r : -1;
}

// eta = 20 R / ((1 - 1/e) G) T^{-3/4},  eps = 405 R^2 T^{-1/2},  K = sqrt(T).
inline PobgaParams pobga_params_from_theorem(std::int64_t T, double R, double G) {
  const std::int64_t K = exact_sqrt(T);
  if (T <= 0 || K < 0) throw std::invalid_argument("T must be a perfect square");
  require(R > 0.0 && G > 0.0, "pobga_params_from_theorem: R and G must be positive");
  PobgaParams p;
  p.T = T;
  p.K = K;
  p.eta = 20.0 * R / (kBoostFactor * G) * std::pow(static_cast<double>(T), -0.75);
  p.eps = 405.0 * R * R / static_cast<double>(K);
  return p;
}

// Per-block view handed to observers, taken after the block's oracle call.
struct BlockEvent {
  std::int64_t block = 0;  // 1-based
  const Vector* x = nullptr;         // decision played in the block
  const Vector* anchor = nullptr;    // infeasible anchor at block start
  const Vector* target = nullptr;    // ascent target passed to the oracle
  const Vector* next_x = nullptr;
  const Vector* next_anchor = nullptr;
  std::int64_t lo_steps = 0;         // consumed by this oracle call
};
using BlockObserver = std::function<void(const BlockEvent&)>;

namespace detail {

inline void begin_record(RunRecord& rec, std::string name, std::uint64_t seed, std::int64_t T,
                         std::int64_t K) {
  rec.algorithm = std::move(name);
  rec.seed = seed;
  rec.T = T;
  rec.K = K;
  rec.block.reserve(T);
  rec.rewards.reserve(T);
  rec.cumulative.reserve(T);
}

}  // namespace detail

template <RewardSource Source>
RunRecord pobga_run(const Source& source, const DecisionSet& set, const PobgaParams& params,
                    const NoiseModel& noise, std::uint64_t seed,
                    const BlockObserver& observer = {}) {
  params.validate();
  RunRecord rec;
  detail::begin_record(rec, "pobga", seed, params.T, params.K);

  const auto n = set.dim();
  Vector x = Vector::Zero(n);
  Vector anchor = Vector::Zero(n);
  Counters c;
  for (std::int64_t m = 0; m < params.blocks(); ++m) {
    Rng rng(derive_seed(seed, 0, static_cast<std::uint64_t>(m)));
    rec.decisions.push_back(x);
    rec.anchors.push_back(anchor);

    Vector acc = Vector::Zero(n);
    for (std::int64_t k = 0; k < params.K; ++k) {
      const std::int64_t t = m * params.K + k;
      const RewardFunction& f = source(t);
      acc += boosted_stochastic_grad(f, x, noise, rng);
      ++c.grad_evals;
      rec.block.push_back(m + 1);
      rec.rewards.push_back(f.eval(x));
      if (k + 1 < params.K) rec.cumulative.push_back(c);
    }

    Vector target = anchor + params.eta * acc;
    IPResult ip = o_ip(set, x, target, params.eps);
    c.lo_steps += ip.lo_steps;
    ++c.oip_calls;
    rec.cumulative.push_back(c);
    if (observer) {
      observer(BlockEvent{m + 1, &x, &anchor, &target, &ip.x, &ip.y_tilde, ip.lo_steps});
    }
    x = std::move(ip.x);
    anchor = std::move(ip.y_tilde);
  }
  rec.totals = c;
  return rec;
}

namespace detail {

template <RewardSource Source, class Grad>
RunRecord projected_ascent(std::string name, const Source& source, const DecisionSet& set,
                           std::int64_t T, double eta, std::uint64_t seed, Grad&& grad) {
  require(T > 0, "projected ascent: T must be positive");
  require(eta > 0.0, "projected ascent: eta must be positive");
  RunRecord rec;
  begin_record(rec, std::move(name), seed, T, 1);
  Vector x = Vector::Zero(set.dim());
  Counters c;
  for (std::int64_t t = 0; t < T; ++t) {
    Rng rng(derive_seed(seed, 0, static_cast<std::uint64_t>(t)));
    const RewardFunction& f = source(t);
    rec.decisions.push_back(x);
    rec.block.push_back(t + 1);
    rec.rewards.push_back(f.eval(x));
    const Vector g = grad(f, x, rng);
    ++c.grad_evals;
    x = set.exact_project(x + eta * g);
    ++c.projections;
    rec.cumulative.push_back(c);
  }
  rec.totals = c;
  return rec;
}

}  // namespace detail

// x_{t+1} = Proj_K[x_t + eta * stochastic grad f_t(x_t)], x_1 = 0.
template <RewardSource Source>
RunRecord oga_run(const Source& source, const DecisionSet& set, std::int64_t T, double eta,
                  const NoiseModel& noise, std::uint64_t seed) {
  return detail::projected_ascent(
      "oga", source, set, T, eta, seed,
      [&](const RewardFunction& f, const Vector& x, Rng& rng) {
        return stochastic_grad(f, x, noise, rng);
      });
}

// OGA driven by the boosted stochastic gradient.
template <RewardSource Source>
RunRecord obga_run(const Source& source, const DecisionSet& set, std::int64_t T, double eta,
                   const NoiseModel& noise, std::uint64_t seed) {
  return detail::projected_ascent(
      "obga", source, set, T, eta, seed,
      [&](const RewardFunction& f, const Vector& x, Rng& rng) {
        return boosted_stochastic_grad(f, x, noise, rng);
      });
}

}  // namespace ocsm

#endif  // OCSM_ALGORITHMS_HPP_
