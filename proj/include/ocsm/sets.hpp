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

// Convex decision sets in the nonnegative orthant that contain the origin and
// admit a closed-form linear minimization oracle.

#ifndef OCSM_SETS_HPP_
#define OCSM_SETS_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ocsm/core.hpp"

namespace ocsm {

// {0 <= x <= upper}
struct Box {
  Vector upper;
};

// {x >= 0, sum x <= budget, x <= cap}. A cap of budget * 1 is inactive.
struct BudgetedSimplex {
  double budget = 1.0;
  Vector cap;
};

// {x >= 0, ||x|| <= radius}
struct NonnegBall {
  double radius = 1.0;
  std::ptrdiff_t n = 0;
};

inline constexpr double kDefaultContainsTol = 1e-9;

class DecisionSet {
 public:
  using Variant = std::variant<Box, BudgetedSimplex, NonnegBall>;

  static DecisionSet box(Vector upper) { return DecisionSet(Box{std::move(upper)}); }
  static DecisionSet budgeted_simplex(std::ptrdiff_t n, double budget) {
    return DecisionSet(BudgetedSimplex{budget, Vector::Constant(n, budget)});
  }
  static DecisionSet budgeted_simplex(double budget, Vector cap) {
    return DecisionSet(BudgetedSimplex{budget, std::move(cap)});
  }
  static DecisionSet nonneg_ball(std::ptrdiff_t n, double radius) {
    return DecisionSet(NonnegBall{radius, n});
  }

  explicit DecisionSet(Variant v) : impl_(std::move(v)) {
    std::visit([this](const auto& s) { validate_and_cache(s); }, impl_);
  }

  const Variant& variant() const { return impl_; }
  std::string kind() const {
    switch (impl_.index()) {
      case 0: return "box";
      case 1: return "budgeted_simplex";
      default: return "nonneg_ball";
    }
  }
  std::ptrdiff_t dim() const { return u_max_.size(); }

  // max_{x in K} ||x||
  double radius() const { return radius_; }
  // Coordinatewise maximum over K.
  const Vector& coordinatewise_max() const { return u_max_; }

  // argmin_{x in K} <c, x>; ties go to the lowest index, then to the origin.
  Vector lmo(const Vector& c) const {
    require_dim(c.size(), dim(), "DecisionSet::lmo");
    return std::visit([&](const auto& s) { return lmo_impl(s, c); }, impl_);
  }

  bool contains(const Vector& x, double tol = kDefaultContainsTol) const {
    if (x.size() != dim()) return false;
    if (!x.allFinite()) return false;
    if ((x.array() < -tol).any()) return false;
    return std::visit([&](const auto& s) { return contains_impl(s, x, tol); }, impl_);
  }

  // Euclidean projection. Only baselines and tests use this.
  Vector exact_project(const Vector& y) const {
    require_dim(y.size(), dim(), "DecisionSet::exact_project");
    return std::visit([&](const auto& s) { return project_impl(s, y); }, impl_);
  }

  // Vertex list when it is finite and small; nullopt otherwise.
  std::optional<std::vector<Vector>> vertices() const {
    return std::visit([&](const auto& s) { return vertices_impl(s); }, impl_);
  }

  // A feasible point with norm equal to the radius.
  Vector farthest_point() const {
    return std::visit([&](const auto& s) { return farthest_impl(s); }, impl_);
  }

  // Random feasible point: rejection from [0, u_K], falling back to a radial
  // shrink toward the origin (valid because K is convex and contains 0).
  Vector sample(Rng& rng) const {
    Vector x(dim());
    for (int attempt = 0; attempt < 64; ++attempt) {
      for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = u_max_(i) * uniform01(rng);
      if (contains(x, 0.0)) return x;
    }
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (contains(mid * x, 0.0) ? lo : hi) = mid;
    }
    return lo * x;
  }

 private:
  void validate_and_cache(const Box& s) {
    require(s.upper.size() > 0 && s.upper.minCoeff() > 0.0, "Box: upper must be positive");
    u_max_ = s.upper;
    radius_ = s.upper.norm();
  }
  void validate_and_cache(const BudgetedSimplex& s) {
    require(s.budget > 0.0, "BudgetedSimplex: budget must be positive");
    require(s.cap.size() > 0 && s.cap.minCoeff() > 0.0, "BudgetedSimplex: cap must be positive");
    u_max_ = s.cap.cwiseMin(s.budget);
    radius_ = farthest_impl(s).norm();
  }
  void validate_and_cache(const NonnegBall& s) {
    require(s.radius > 0.0, "NonnegBall: radius must be positive");
    require(s.n > 0, "NonnegBall: dimension must be positive");
    u_max_ = Vector::Constant(s.n, s.radius);
    radius_ = s.radius;
  }

  static Vector lmo_impl(const Box& s, const Vector& c) {
    Vector v = Vector::Zero(c.size());
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      if (c(i) < 0.0) v(i) = s.upper(i);
    }
    return v;
  }
  // Fractional knapsack: fill the most negative costs first up to each cap.
  static Vector lmo_impl(const BudgetedSimplex& s, const Vector& c) {
    Vector v = Vector::Zero(c.size());
    std::vector<Eigen::Index> order(c.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return c(a) < c(b); });
    double left = s.budget;
    for (Eigen::Index i : order) {
      if (c(i) >= 0.0 || left <= 0.0) break;
      const double take = std::min(s.cap(i), left);
      v(i) = take;
      left -= take;
    }
    return v;
  }
  static Vector lmo_impl(const NonnegBall& s, const Vector& c) {
    Vector d = (-c).cwiseMax(0.0);
    const double len = d.norm();
    if (len == 0.0) return Vector::Zero(c.size());
    return (s.radius / len) * d;
  }

  static bool contains_impl(const Box& s, const Vector& x, double tol) {
    return ((x - s.upper).array() <= tol).all();
  }
  static bool contains_impl(const BudgetedSimplex& s, const Vector& x, double tol) {
    return ((x - s.cap).array() <= tol).all() && x.sum() <= s.budget + tol;
  }
  static bool contains_impl(const NonnegBall& s, const Vector& x, double tol) {
    return x.norm() <= s.radius + tol;
  }

  static Vector project_impl(const Box& s, const Vector& y) {
    return y.cwiseMax(0.0).cwiseMin(s.upper);
  }
  // Clamp then shrink: for the nonnegative orthant cut by a centered ball
  // the two projections compose.
  static Vector project_impl(const NonnegBall& s, const Vector& y) {
    Vector p = y.cwiseMax(0.0);
    const double len = p.norm();
    if (len > s.radius) p *= s.radius / len;
    return p;
  }
  // x(theta) = clamp(y - theta, 0, cap). If theta = 0 is feasible it is the
  // projection; otherwise sum x(theta) = budget is solved exactly by sorting
  // the breakpoints of the piecewise-linear, nonincreasing sum.
  static Vector project_impl(const BudgetedSimplex& s, const Vector& y) {
    auto clamp_at = [&](double theta) {
      return (y.array() - theta).max(0.0).min(s.cap.array()).matrix().eval();
    };
    Vector x0 = clamp_at(0.0);
    if (x0.sum() <= s.budget) return x0;

    std::vector<double> breaks;
    breaks.reserve(2 * y.size() + 1);
    breaks.push_back(0.0);
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      if (y(i) > 0.0) breaks.push_back(y(i));
      if (y(i) - s.cap(i) > 0.0) breaks.push_back(y(i) - s.cap(i));
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    // sum x(theta) is >= budget at theta = 0 and 0 at the last breakpoint.
    double lo = breaks.front();
    double s_lo = clamp_at(lo).sum();
    for (std::size_t k = 1; k < breaks.size(); ++k) {
      const double hi = breaks[k];
      const double s_hi = clamp_at(hi).sum();
      if (s_hi <= s.budget) {
        // Linear on [lo, hi].
        const double theta = lo + (s_lo - s.budget) * (hi - lo) / (s_lo - s_hi);
        return clamp_at(theta);
      }
      lo = hi;
      s_lo = s_hi;
    }
    return clamp_at(lo);
  }

  static std::optional<std::vector<Vector>> vertices_impl(const Box& s) {
    const auto n = s.upper.size();
    if (n > 12) return std::nullopt;
    std::vector<Vector> out;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      Vector v = Vector::Zero(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        if (mask & (std::uint64_t{1} << i)) v(i) = s.upper(i);
      }
      out.push_back(std::move(v));
    }
    return out;
  }
  static std::optional<std::vector<Vector>> vertices_impl(const BudgetedSimplex& s) {
    // Only the uncapped simplex has the simple vertex list {0, b e_i}.
    if ((s.cap.array() < s.budget).any()) return std::nullopt;
    const auto n = s.cap.size();
    std::vector<Vector> out{Vector::Zero(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
      Vector v = Vector::Zero(n);
      v(i) = s.budget;
      out.push_back(std::move(v));
    }
    return out;
  }
  static std::optional<std::vector<Vector>> vertices_impl(const NonnegBall&) {
    return std::nullopt;
  }

  static Vector farthest_impl(const Box& s) { return s.upper; }
  // Greedy by largest cap: the resulting vertex majorizes every other vertex,
  // so it maximizes the (Schur-convex) squared norm.
  static Vector farthest_impl(const BudgetedSimplex& s) {
    Vector v = Vector::Zero(s.cap.size());
    std::vector<Eigen::Index> order(s.cap.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return s.cap(a) > s.cap(b); });
    double left = s.budget;
    for (Eigen::Index i : order) {
      if (left <= 0.0) break;
      v(i) = std::min(s.cap(i), left);
      left -= v(i);
    }
    return v;
  }
  static Vector farthest_impl(const NonnegBall& s) {
    Vector v = Vector::Zero(s.n);
    v(0) = s.radius;
    return v;
  }

  Variant impl_;
  Vector u_max_;
  double radius_ = 0.0;
};

}  // namespace ocsm

#endif  // OCSM_SETS_HPP_
