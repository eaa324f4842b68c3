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

#ifndef OCSM_RUN_RECORD_HPP_
#define OCSM_RUN_RECORD_HPP_

#include <concepts>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "ocsm/core.hpp"
#include "ocsm/functions.hpp"

namespace ocsm {

struct Counters {
  std::int64_t grad_evals = 0;
  std::int64_t lo_steps = 0;
  std::int64_t projections = 0;
  std::int64_t comms = 0;
  std::int64_t oip_calls = 0;

  friend bool operator==(const Counters&, const Counters&) = default;
};

// One learner's trajectory. Decisions are stored once per block; round t
// (0-based) played decisions[block[t] - 1].
struct RunRecord {
  std::string algorithm;
  std::uint64_t seed = 0;
  std::int64_t T = 0;
  std::int64_t K = 1;
  std::int64_t node = 0;

  std::vector<std::int64_t> block;    // 1-based block id per round
  std::vector<double> rewards;        // exact f_t(x_t) per round
  std::vector<Counters> cumulative;   // counters after each round
  std::vector<Vector> decisions;      // one per block
  std::vector<Vector> anchors;        // infeasible anchor per block (POBGA family)
  Counters totals;

  // Filled in by the harness.
  std::vector<double> alpha_regret;
  double comparator = std::numeric_limits<double>::quiet_NaN();

  const Vector& decision_at(std::int64_t t) const { return decisions.at(block.at(t) - 1); }

  double total_reward() const {
    double s = 0.0;
    for (double r : rewards) s += r;
    return s;
  }

  friend bool operator==(const RunRecord& a, const RunRecord& b) {
    auto same_vectors = [](const std::vector<Vector>& u, const std::vector<Vector>& v) {
      if (u.size() != v.size()) return false;
      for (std::size_t i = 0; i < u.size(); ++i) {
        if (u[i].size() != v[i].size() || !(u[i].array() == v[i].array()).all()) return false;
      }
      return true;
    };
    return a.T == b.T && a.K == b.K && a.block == b.block && a.rewards == b.rewards &&
           a.cumulative == b.cumulative && a.totals == b.totals &&
           same_vectors(a.decisions, b.decisions) && same_vectors(a.anchors, b.anchors);
  }
};

// A round-indexed source of reward functions, t = 0 .. T-1. The online
// protocol only reveals f_t after x_t is fixed; the algorithms respect that
// by querying the source inside the round loop.
template <class S>
concept RewardSource = requires(const S& s, std::int64_t t) {
  { s(t) } -> std::convertible_to<const RewardFunction&>;
};

}  // namespace ocsm

#endif  // OCSM_RUN_RECORD_HPP_
