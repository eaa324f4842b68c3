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

// Infeasible projection built only from linear minimization steps.
//
// o_ip(K, x0, y0, eps) returns a feasible x and a point y~ inside the
// radius-R ball such that
//   ||x - y~||^2 <= 3 eps  and  ||y~ - z||^2 <= ||y0 - z||^2 for all z in K,
// i.e. y~ is as good as the true projection for the purposes of a
// gradient-ascent regret argument, without ever solving a projection.
//
// The workhorse is shfw: Frank-Wolfe on ||x - y||^2 that stops once it is
// either close to y or has found a hyperplane (normal y - x) nearly
// separating y from K.

#ifndef OCSM_INFEASIBLE_PROJECTION_HPP_
#define OCSM_INFEASIBLE_PROJECTION_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ocsm/core.hpp"
#include "ocsm/sets.hpp"

namespace ocsm {

enum class ShfwStop { kClose, kSeparating };

struct ShfwOutcome {
  Vector x_tilde;
  ShfwStop reason = ShfwStop::kClose;
  std::int64_t lo_steps = 0;
};

struct IPResult {
  Vector x;
  Vector y_tilde;
  std::int64_t lo_steps = 0;
};

// Optional instrumentation of the outer loop: anchors[i] is y_{i+1} and
// feasible[i] the SHFW output paired with it; separated[i] records whether
// that pair triggered the anchor step.
struct IpTrace {
  std::vector<Vector> anchors;
  std::vector<Vector> feasible;
  std::vector<bool> separated;
};

// First factor of the step budget, ceil(27 R^2 / eps - 2).
inline double shfw_step_factor(double radius, double eps) {
  return std::ceil(27.0 * radius * radius / eps - 2.0);
}

// Worst-case number of linear optimization steps of one o_ip call:
//   ceil(27R^2/eps - 2) * max(1, d(d - eps)/(4 eps^2) + 1),  d = ||x0 - y0||^2.
// Nonpositive when eps >= 13.5 R^2; see o_ip for how that regime is handled.
inline double lo_budget(double radius, double eps, double dist2) {
  const double outer = std::max(1.0, dist2 * (dist2 - eps) / (4.0 * eps * eps) + 1.0);
  return shfw_step_factor(radius, eps) * outer;
}

inline ShfwOutcome shfw(const DecisionSet& set, const Vector& x_init, const Vector& y_target,
                        double eps) {
  require(eps > 0.0, "shfw: eps must be positive");
  require_dim(x_init.size(), set.dim(), "shfw");
  require_dim(y_target.size(), set.dim(), "shfw");

  const double R = set.radius();
  const auto cap = static_cast<std::int64_t>(
      10.0 * std::max(1.0, std::ceil(27.0 * R * R / eps)));

  ShfwOutcome out{x_init, ShfwStop::kClose, 0};
  Vector& x = out.x_tilde;
  for (;;) {
    const Vector residual = x - y_target;
    const Vector v = set.lmo(residual);
    ++out.lo_steps;

    const double dist2 = residual.squaredNorm();
    if (dist2 <= 3.0 * eps) {
      out.reason = ShfwStop::kClose;
      return out;
    }
    if (residual.dot(x - v) <= eps) {
      out.reason = ShfwStop::kSeparating;
      return out;
    }
    if (out.lo_steps >= cap) {
      throw ContractViolation("shfw: iteration cap " + std::to_string(cap) + " reached");
    }
    // Exact line search of ||y - x - s (v - x)||^2 over s in [0, 1].
    const Vector dir = v - x;
    const double dd = dir.squaredNorm();
    const double step = std::clamp((y_target - x).dot(dir) / dd, 0.0, 1.0);
    x += step * dir;
  }
}

inline IPResult o_ip(const DecisionSet& set, const Vector& x0, const Vector& y0, double eps,
                     IpTrace* trace = nullptr) {
  require(eps > 0.0, "o_ip: eps must be positive");
  require_dim(x0.size(), set.dim(), "o_ip");
  require_dim(y0.size(), set.dim(), "o_ip");

  const double R = set.radius();
  Vector y = y0 / std::max(1.0, y0.norm() / R);
  const double dist2 = (x0 - y0).squaredNorm();
  if (dist2 <= 3.0 * eps) {
    return {x0, std::move(y), 0};
  }

  // A single SHFW call always costs one step even where the literal budget
  // is nonpositive (eps >= 13.5 R^2); in that regime the first SHFW call
  // returns "close" immediately, so one step is exact.
  const double budget = std::max(lo_budget(R, eps, dist2), 1.0);
  const double gamma = 2.0 * eps / dist2;

  IPResult out{x0, Vector(), 0};
  for (;;) {
    ShfwOutcome step = shfw(set, out.x, y, eps);
    out.lo_steps += step.lo_steps;
    out.x = std::move(step.x_tilde);
    if (static_cast<double>(out.lo_steps) > budget) {
      throw ContractViolation("o_ip: " + std::to_string(out.lo_steps) +
                              " linear optimization steps exceed the budget " +
                              std::to_string(budget));
    }
    const bool far = (out.x - y).squaredNorm() > 3.0 * eps;
    if (trace) {
      trace->anchors.push_back(y);
      trace->feasible.push_back(out.x);
      trace->separated.push_back(far);
    }
    if (!far) break;
    y -= gamma * (y - out.x);
  }
  out.y_tilde = std::move(y);
  return out;
}

}  // namespace ocsm

#endif  // OCSM_INFEASIBLE_PROJECTION_HPP_
