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

// Experiment harness: adversaries, the offline grid comparator, alpha-regret
// traces, and log-log slope fits.

#ifndef OCSM_HARNESS_HPP_
#define OCSM_HARNESS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <memory>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ocsm/core.hpp"
#include "ocsm/decentralized.hpp"
#include "ocsm/functions.hpp"
#include "ocsm/run_record.hpp"
#include "ocsm/sets.hpp"

namespace ocsm {

struct AdversarySpec {
  std::string family = "quadratic";  // quadratic | coverage
  std::ptrdiff_t n = 2;
  std::string regenerate = "iid";    // iid: fresh instance per round; fixed: one replayed
  double sigma = 0.1;
  std::uint64_t salt = 0;            // mixed into the run seed

  // quadratic: H_ij ~ -U[0, curvature], h = -H u_K + U[0, slack]
  double curvature = 1.0;
  double slack = 1.0;
  // coverage: `sets` groups, weights ~ U[0, 1], exponents ~ {0, 1, 2}
  int sets = 4;

  void validate() const {
    require(family == "quadratic" || family == "coverage",
            "adversary.family must be 'quadratic' or 'coverage'");
    require(regenerate == "iid" || regenerate == "fixed",
            "adversary.regenerate must be 'iid' or 'fixed'");
    require(n >= 1, "adversary.n must be >= 1");
    require(sigma >= 0.0, "adversary.sigma must be >= 0");
    require(curvature >= 0.0 && slack >= 0.0, "adversary curvature/slack must be >= 0");
    require(sets >= 1, "adversary.sets must be >= 1");
  }
};

inline QuadraticReward random_quadratic(std::ptrdiff_t n, const Vector& upper, double curvature,
                                        double slack, Rng& rng) {
  Matrix H = Matrix::Zero(n, n);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    for (std::ptrdiff_t j = i; j < n; ++j) {
      const double v = -curvature * uniform01(rng);
      H(i, j) = v;
      H(j, i) = v;
    }
  }
  Vector h = -(H * upper);
  for (std::ptrdiff_t i = 0; i < n; ++i) h(i) += slack * uniform01(rng);
  h = h.cwiseMax(0.0);
  return QuadraticReward(std::move(H), std::move(h));
}

inline CoverageReward random_coverage(std::ptrdiff_t n, int sets, Rng& rng) {
  Vector w(sets);
  Matrix a(sets, n);
  for (int j = 0; j < sets; ++j) {
    w(j) = uniform01(rng);
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      a(j, i) = static_cast<double>(std::uniform_int_distribution<int>(0, 2)(rng));
    }
  }
  return CoverageReward(std::move(w), std::move(a));
}

// Deterministic, round-indexed adversary for one node. Instances are
// materialized up front so that G can be computed over the whole horizon.
class Adversary {
 public:
  Adversary(const AdversarySpec& spec, const DecisionSet& set, std::int64_t T,
            std::uint64_t seed, std::uint64_t node = 0)
      : noise_{spec.sigma} {
    spec.validate();
    require(spec.n == set.dim(), "adversary dimension does not match the decision set");
    require(T > 0, "adversary horizon must be positive");
    if (spec.family == "coverage") {
      require(set.coordinatewise_max().maxCoeff() <= 1.0 + 1e-12,
              "coverage rewards need a decision set inside [0, 1]^n");
    }
    const std::int64_t count = spec.regenerate == "fixed" ? 1 : T;
    fixed_ = spec.regenerate == "fixed";
    functions_.reserve(count);
    for (std::int64_t t = 0; t < count; ++t) {
      Rng rng(derive_seed(seed ^ mix_seed(spec.salt), "adversary",
                          (node << 40) ^ static_cast<std::uint64_t>(t)));
      if (spec.family == "quadratic") {
        functions_.emplace_back(random_quadratic(spec.n, set.coordinatewise_max(),
                                                 spec.curvature, spec.slack, rng));
      } else {
        functions_.emplace_back(random_coverage(spec.n, spec.sets, rng));
      }
    }
    T_ = T;
    const double R = set.radius();
    for (const auto& f : functions_) {
      grad_bound_ = std::max(grad_bound_, f.gradient_norm_bound(R));
      smoothness_ = std::max(smoothness_, f.smoothness());
    }
  }

  // Replays an explicit instance every round.
  Adversary(RewardFunction f, NoiseModel noise, const DecisionSet& set, std::int64_t T)
      : noise_(noise), fixed_(true), T_(T) {
    require_dim(f.dim(), set.dim(), "Adversary");
    grad_bound_ = f.gradient_norm_bound(set.radius());
    smoothness_ = f.smoothness();
    functions_.push_back(std::move(f));
  }

  const RewardFunction& operator()(std::int64_t t) const {
    return fixed_ ? functions_.front() : functions_.at(static_cast<std::size_t>(t));
  }
  std::int64_t horizon() const { return T_; }
  const NoiseModel& noise() const { return noise_; }
  // G = sup_t sup_K ||grad f_t|| + sigma bounds every stochastic gradient.
  GradientBound bound() const { return {grad_bound_ + noise_.sigma, smoothness_}; }

 private:
  std::vector<RewardFunction> functions_;
  NoiseModel noise_;
  bool fixed_ = false;
  std::int64_t T_ = 0;
  double grad_bound_ = 0.0;
  double smoothness_ = 0.0;
};

// Per-node adversaries behind the (node, t) interface of dpobga_run.
class NetworkAdversary {
 public:
  NetworkAdversary(const AdversarySpec& spec, const DecisionSet& set, std::int64_t T,
                   std::uint64_t seed, int nodes) {
    for (int i = 0; i < nodes; ++i) {
      nodes_.emplace_back(spec, set, T, seed, static_cast<std::uint64_t>(i));
    }
  }
  const RewardFunction& operator()(int node, std::int64_t t) const { return nodes_.at(node)(t); }
  const Adversary& node(int i) const { return nodes_.at(i); }
  int size() const { return static_cast<int>(nodes_.size()); }
  GradientBound bound() const {
    GradientBound b;
    for (const auto& a : nodes_) {
      b.G = std::max(b.G, a.bound().G);
      b.L = std::max(b.L, a.bound().L);
    }
    return b;
  }

 private:
  std::vector<Adversary> nodes_;
};

// ---------------------------------------------------------------------------
// Offline comparator

inline constexpr std::ptrdiff_t kMaxGridDim = 4;

// Feasible points of the g^n grid over [0, u_K], one per row.
inline Matrix feasible_grid(const DecisionSet& set, int g) {
  const auto n = set.dim();
  if (n > kMaxGridDim) {
    throw std::invalid_argument("offline comparator: dimension " + std::to_string(n) +
                                " too large for grid search (max " +
                                std::to_string(kMaxGridDim) + ")");
  }
  require(g >= 2, "offline comparator: grid resolution must be >= 2");
  const Vector& u = set.coordinatewise_max();
  std::int64_t total = 1;
  for (std::ptrdiff_t i = 0; i < n; ++i) total *= g;
  std::vector<Vector> keep;
  std::vector<int> idx(n, 0);
  Vector p(n);
  for (std::int64_t k = 0; k < total; ++k) {
    for (std::ptrdiff_t i = 0; i < n; ++i) p(i) = u(i) * idx[i] / (g - 1);
    if (set.contains(p)) keep.push_back(p);
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      if (++idx[i] < g) break;
      idx[i] = 0;
    }
  }
  Matrix out(static_cast<Eigen::Index>(keep.size()), n);
  for (std::size_t r = 0; r < keep.size(); ++r) out.row(r) = keep[r].transpose();
  return out;
}

struct Comparator {
  Vector x;
  double value = 0.0;
};

inline Comparator offline_best(std::span<const RewardFunction> functions, const DecisionSet& set,
                               int g = 129) {
  const Matrix grid = feasible_grid(set, g);
  Vector sum = Vector::Zero(grid.rows());
  for (const auto& f : functions) sum += f.eval_rows(grid);
  Eigen::Index best = 0;
  const double value = sum.maxCoeff(&best);
  return {grid.row(best).transpose(), value};
}

// max_x sum_{s <= t} f_s(x) for every round t, with f_s given by a row
// evaluator round_values(s, grid) -> values at the grid points. With
// stride > 1 the maximum is refreshed only every `stride` rounds (and at the
// last round); rounds in between carry the last refreshed value.
template <class RoundValues>
std::vector<double> prefix_best(const DecisionSet& set, int g, std::int64_t T,
                                RoundValues&& round_values, std::int64_t stride = 1) {
  require(stride >= 1, "prefix_best: stride must be >= 1");
  const Matrix grid = feasible_grid(set, g);
  Vector sum = Vector::Zero(grid.rows());
  std::vector<double> out(static_cast<std::size_t>(T));
  double last = 0.0;
  for (std::int64_t t = 0; t < T; ++t) {
    sum += round_values(t, grid);
    if ((t + 1) % stride == 0 || t + 1 == T) last = sum.maxCoeff();
    out[static_cast<std::size_t>(t)] = last;
  }
  return out;
}

template <RewardSource Source>
std::vector<double> prefix_best(const Source& source, const DecisionSet& set, int g,
                                std::int64_t T, std::int64_t stride = 1) {
  return prefix_best(
      set, g, T, [&](std::int64_t t, const Matrix& grid) { return source(t).eval_rows(grid); },
      stride);
}

// alpha * V*_t - sum_{s <= t} f_s(x_s) per round; prefix[T-1] is the full
// comparator.
inline std::vector<double> alpha_regret(const RunRecord& rec, const std::vector<double>& prefix,
                                        double alpha = kBoostFactor) {
  require(static_cast<std::int64_t>(rec.rewards.size()) == rec.T, "alpha_regret: incomplete record");
  require(prefix.size() == rec.rewards.size(), "alpha_regret: comparator length mismatch");
  std::vector<double> out(rec.rewards.size());
  double cum = 0.0;
  for (std::size_t t = 0; t < out.size(); ++t) {
    cum += rec.rewards[t];
    out[t] = alpha * prefix[t] - cum;
  }
  return out;
}

// Final alpha-regret against a single comparator value.
inline double alpha_regret(const RunRecord& rec, double comparator, double alpha = kBoostFactor) {
  return alpha * comparator - rec.total_reward();
}

// Regret of every node measured on the network-average function
// (1/N) sum_j f_{t,j}; fills each record's trace and comparator and returns
// the final values.
template <NodeRewardSource Source>
std::vector<double> decentralized_regret(std::vector<RunRecord>& records, const Source& source,
                                         const DecisionSet& set, int g,
                                         double alpha = kBoostFactor, std::int64_t stride = 1) {
  require(!records.empty(), "decentralized_regret: no records");
  const int N = static_cast<int>(records.size());
  const std::int64_t T = records.front().T;
  for (const auto& r : records) {
    require(r.T == T && static_cast<std::int64_t>(r.rewards.size()) == T,
            "decentralized_regret: incomplete records");
  }
  auto average_at = [&](std::int64_t t, const Matrix& pts) {
    Vector v = Vector::Zero(pts.rows());
    for (int j = 0; j < N; ++j) v += source(j, t).eval_rows(pts);
    return Vector(v / static_cast<double>(N));
  };
  const std::vector<double> prefix = prefix_best(set, g, T, average_at, stride);

  std::vector<double> finals;
  for (auto& rec : records) {
    rec.alpha_regret.assign(T, 0.0);
    double cum = 0.0;
    for (std::int64_t t = 0; t < T; ++t) {
      const Vector& x = rec.decision_at(t);
      double avg = 0.0;
      for (int j = 0; j < N; ++j) avg += source(j, t).eval(x);
      cum += avg / N;
      rec.alpha_regret[t] = alpha * prefix[t] - cum;
    }
    rec.comparator = prefix.back();
    finals.push_back(rec.alpha_regret.back());
  }
  return finals;
}

// ---------------------------------------------------------------------------
// Rate estimation

struct SlopeFit {
  double slope = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  std::vector<std::string> warnings;
};

// Least-squares slope of log(regret) against log(T).
inline SlopeFit slope_estimate(const std::vector<std::pair<double, double>>& pairs) {
  SlopeFit fit;
  std::vector<double> lx, ly;
  for (const auto& [T, r] : pairs) {
    if (!(r > 0.0) || !(T > 0.0)) {
      std::ostringstream os;
      os << "excluded nonpositive point (T=" << T << ", regret=" << r << ")";
      fit.warnings.push_back(os.str());
      continue;
    }
    lx.push_back(std::log(T));
    ly.push_back(std::log(r));
  }
  fit.used = lx.size();
  if (lx.size() < 2) {
    fit.warnings.emplace_back("fewer than two usable points");
    return fit;
  }
  if (lx.size() < 3) fit.warnings.emplace_back("fewer than three horizons");
  const double k = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

// ---------------------------------------------------------------------------
// CSV output

inline constexpr const char* kCsvHeader =
    "run_id,algorithm,T,K,seed,t,block,reward,cum_reward,lo_steps,grad_evals,comms,alpha_regret";

inline void write_csv_rows(std::ostream& os, const std::string& run_id, const RunRecord& rec) {
  std::ostringstream line;
  line << std::setprecision(17);
  double cum = 0.0;
  for (std::int64_t t = 0; t < rec.T; ++t) {
    const auto& c = rec.cumulative.at(t);
    cum += rec.rewards.at(t);
    line.str("");
    line << run_id << ',' << rec.algorithm << ',' << rec.T << ',' << rec.K << ',' << rec.seed
         << ',' << (t + 1) << ',' << rec.block.at(t) << ',' << rec.rewards.at(t) << ',' << cum
         << ',' << c.lo_steps << ',' << c.grad_evals << ',' << c.comms << ',';
    if (rec.alpha_regret.size() == rec.rewards.size()) line << rec.alpha_regret.at(t);
    os << line.str() << '\n';
  }
}

}  // namespace ocsm

#endif  // OCSM_HARNESS_HPP_
