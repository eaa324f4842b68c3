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

// Reward families for online DR-submodular maximization.
//
// Every family satisfies f(0) = 0, is monotone on its paired decision set and
// has an antitone gradient (the first-order form of continuous
// DR-submodularity). Each exposes an exact value and gradient; the stochastic
// and boosted oracles are free functions below, driven by an explicit Rng.

#ifndef OCSM_FUNCTIONS_HPP_
#define OCSM_FUNCTIONS_HPP_

#include <algorithm>
#include <cmath>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>

#include "ocsm/core.hpp"
#include "ocsm/quadrature.hpp"

namespace ocsm {

// f(x) = <h, x> + 1/2 x^T H x with H symmetric and entrywise nonpositive.
// H = 0 gives the linear family.
class QuadraticReward {
 public:
  QuadraticReward(Matrix H, Vector h) : H_(std::move(H)), h_(std::move(h)) {
    require(H_.rows() == H_.cols(), "QuadraticReward: H must be square");
    require_dim(h_.size(), H_.rows(), "QuadraticReward");
    require(H_.size() == 0 || (H_ - H_.transpose()).cwiseAbs().maxCoeff() == 0.0,
            "QuadraticReward: H must be symmetric");
    require(H_.size() == 0 || H_.maxCoeff() <= 0.0,
            "QuadraticReward: H must be entrywise <= 0");
    require(h_.size() == 0 || h_.minCoeff() >= 0.0,
            "QuadraticReward: h must be nonnegative");
  }

  static QuadraticReward linear(Vector g) {
    const auto n = g.size();
    return QuadraticReward(Matrix::Zero(n, n), std::move(g));
  }
  static QuadraticReward zero(std::ptrdiff_t n) {
    return QuadraticReward(Matrix::Zero(n, n), Vector::Zero(n));
  }

  std::ptrdiff_t dim() const { return h_.size(); }
  const Matrix& H() const { return H_; }
  const Vector& h() const { return h_; }

  double eval(const Vector& x) const {
    require_dim(x.size(), dim(), "QuadraticReward::eval");
    return h_.dot(x) + 0.5 * x.dot(H_ * x);
  }
  Vector grad(const Vector& x) const {
    require_dim(x.size(), dim(), "QuadraticReward::grad");
    return h_ + H_ * x;
  }
  // One row per point.
  Vector eval_rows(const Matrix& points) const {
    require_dim(points.cols(), dim(), "QuadraticReward::eval_rows");
    return points * h_ + 0.5 * (points * H_).cwiseProduct(points).rowwise().sum();
  }

  // Spectral norm of H, the Lipschitz constant of the gradient.
  double smoothness() const {
    if (dim() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(H_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  // sup over the radius-R ball of ||h + H x||.
  double gradient_norm_bound(double radius) const {
    return h_.norm() + smoothness() * radius;
  }
  // grad f >= 0 on the box [0, upper] iff h + H upper >= 0 (H <= 0).
  bool monotone_on_box(const Vector& upper) const {
    require_dim(upper.size(), dim(), "QuadraticReward::monotone_on_box");
    return dim() == 0 || (h_ + H_ * upper).minCoeff() >= -1e-12;
  }

 private:
  Matrix H_;
  Vector h_;
};

// f(x) = sum_j w_j (1 - prod_i (1 - x_i)^{a_ji}) on [0, 1]^n.
//
// Exponents are restricted to {0, 1} u [2, inf) so that the gradient and the
// Hessian stay bounded up to the face x_i = 1.
class CoverageReward {
 public:
  CoverageReward(Vector weights, Matrix exponents)
      : w_(std::move(weights)), a_(std::move(exponents)) {
    require_dim(a_.rows(), w_.size(), "CoverageReward");
    require(w_.size() == 0 || w_.minCoeff() >= 0.0, "CoverageReward: weights must be >= 0");
    for (Eigen::Index j = 0; j < a_.rows(); ++j) {
      for (Eigen::Index i = 0; i < a_.cols(); ++i) {
        const double e = a_(j, i);
        require(e == 0.0 || e == 1.0 || e >= 2.0,
                "CoverageReward: exponents must lie in {0, 1} or [2, inf)");
      }
    }
  }

  std::ptrdiff_t dim() const { return a_.cols(); }
  const Vector& weights() const { return w_; }
  const Matrix& exponents() const { return a_; }

  double eval(const Vector& x) const {
    require_dim(x.size(), dim(), "CoverageReward::eval");
    double total = 0.0;
    for (Eigen::Index j = 0; j < a_.rows(); ++j) {
      double miss = 1.0;
      for (Eigen::Index i = 0; i < dim(); ++i) miss *= factor(x(i), a_(j, i));
      total += w_(j) * (1.0 - miss);
    }
    return total;
  }

  Vector grad(const Vector& x) const {
    require_dim(x.size(), dim(), "CoverageReward::grad");
    Vector g = Vector::Zero(dim());
    for (Eigen::Index j = 0; j < a_.rows(); ++j) {
      for (Eigen::Index i = 0; i < dim(); ++i) {
        const double e = a_(j, i);
        if (e == 0.0) continue;
        double rest = 1.0;
        for (Eigen::Index k = 0; k < dim(); ++k) {
          if (k != i) rest *= factor(x(k), a_(j, k));
        }
        g(i) += w_(j) * e * factor(x(i), e - 1.0) * rest;
      }
    }
    return g;
  }

  Vector eval_rows(const Matrix& points) const {
    require_dim(points.cols(), dim(), "CoverageReward::eval_rows");
    Vector out(points.rows());
    for (Eigen::Index r = 0; r < points.rows(); ++r) out(r) = eval(points.row(r).transpose());
    return out;
  }

  // Each partial is at most sum_j w_j a_ji on [0, 1]^n.
  double gradient_norm_bound() const {
    return (a_.transpose() * w_).norm();
  }

  // Frobenius norm of the entrywise Hessian bound.
  double smoothness() const {
    Matrix B = Matrix::Zero(dim(), dim());
    for (Eigen::Index j = 0; j < a_.rows(); ++j) {
      for (Eigen::Index i = 0; i < dim(); ++i) {
        for (Eigen::Index k = 0; k < dim(); ++k) {
          const double aji = a_(j, i);
          B(i, k) += w_(j) * (i == k ? aji * std::max(aji - 1.0, 0.0) : aji * a_(j, k));
        }
      }
    }
    return B.norm();
  }

 private:
  // (1 - x)^e with 0^0 = 1.
  static double factor(double x, double e) {
    if (e == 0.0) return 1.0;
    if (e == 1.0) return 1.0 - x;
    return std::pow(std::max(1.0 - x, 0.0), e);
  }

  Vector w_;
  Matrix a_;
};

// Closed set of reward families.
class RewardFunction {
 public:
  using Variant = std::variant<QuadraticReward, CoverageReward>;

  RewardFunction(QuadraticReward q) : impl_(std::move(q)) {}  // NOLINT
  RewardFunction(CoverageReward c) : impl_(std::move(c)) {}   // NOLINT

  const Variant& variant() const { return impl_; }
  std::string family() const {
    return std::holds_alternative<QuadraticReward>(impl_) ? "quadratic" : "coverage";
  }

  std::ptrdiff_t dim() const {
    return std::visit([](const auto& f) { return f.dim(); }, impl_);
  }
  double eval(const Vector& x) const {
    return std::visit([&](const auto& f) { return f.eval(x); }, impl_);
  }
  Vector grad(const Vector& x) const {
    return std::visit([&](const auto& f) { return f.grad(x); }, impl_);
  }
  Vector eval_rows(const Matrix& points) const {
    return std::visit([&](const auto& f) { return f.eval_rows(points); }, impl_);
  }
  double smoothness() const {
    return std::visit([](const auto& f) { return f.smoothness(); }, impl_);
  }
  // sup_{x in K} ||grad f(x)|| for a set of the given radius.
  double gradient_norm_bound(double radius) const {
    return std::visit(
        [&](const auto& f) {
          if constexpr (std::is_same_v<std::decay_t<decltype(f)>, QuadraticReward>) {
            return f.gradient_norm_bound(radius);
          } else {
            return f.gradient_norm_bound();
          }
        },
        impl_);
  }

 private:
  Variant impl_;
};

// Zero-mean perturbation drawn uniformly from the radius-sigma sphere.
struct NoiseModel {
  double sigma = 0.0;
};

struct GradientBound {
  double G = 0.0;  // bound on every stochastic gradient norm over K
  double L = 0.0;  // smoothness constant
};

inline GradientBound gradient_bound(const RewardFunction& f, double radius,
                                    const NoiseModel& noise) {
  return {f.gradient_norm_bound(radius) + noise.sigma, f.smoothness()};
}

inline Vector stochastic_grad(const RewardFunction& f, const Vector& x,
                              const NoiseModel& noise, Rng& rng) {
  Vector g = f.grad(x);
  if (noise.sigma > 0.0) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector xi(g.size());
    double len = 0.0;
    do {
      for (Eigen::Index i = 0; i < xi.size(); ++i) xi(i) = normal(rng);
      len = xi.norm();
    } while (len == 0.0);
    g += (noise.sigma / len) * xi;
  }
  return g;
}

// Inverse CDF of the boosting variable Z with density e^{z-1} / (1 - e^{-1})
// on [0, 1]: z(p) = 1 + ln(e^{-1} + p (1 - e^{-1})) = ln(1 + p (e - 1)).
inline double boost_z_from_uniform(double p) {
  const double z = std::log1p(p * std::expm1(1.0));
  return std::clamp(z, 0.0, 1.0);
}

inline double sample_boost_z(Rng& rng) { return boost_z_from_uniform(uniform01(rng)); }

struct BoostedGradient {
  Vector value;
  double z = 0.0;
};

// (1 - 1/e) * stochastic gradient at z * x with z ~ Z. Unbiased for the
// gradient of the boosting surrogate F(x) = int_0^1 e^{z-1}/z f(z x) dz.
inline BoostedGradient boosted_stochastic_grad_logged(const RewardFunction& f, const Vector& x,
                                                      const NoiseModel& noise, Rng& rng) {
  const double z = sample_boost_z(rng);
  Vector scaled = z * x;
  return {kBoostFactor * stochastic_grad(f, scaled, noise, rng), z};
}

inline Vector boosted_stochastic_grad(const RewardFunction& f, const Vector& x,
                                      const NoiseModel& noise, Rng& rng) {
  return boosted_stochastic_grad_logged(f, x, noise, rng).value;
}

// Quadrature of grad F(x) = int_0^1 e^{z-1} grad f(z x) dz. Test oracle.
inline Vector boost_grad_quadrature(const RewardFunction& f, const Vector& x, int nodes = 64) {
  require(nodes >= 16, "boost_grad_quadrature: nodes must be >= 16");
  const QuadratureRule& rule = cached_gauss_legendre_unit(nodes);
  Vector acc = Vector::Zero(x.size());
  for (int k = 0; k < nodes; ++k) {
    const double z = rule.nodes[k];
    acc += (rule.weights[k] * std::exp(z - 1.0)) * f.grad(z * x);
  }
  return acc;
}

// Quadrature of F(x) = int_0^1 e^{z-1}/z f(z x) dz. Test oracle; the
// integrand tends to <grad f(0), x> as z -> 0 since f(0) = 0.
inline double boost_value_quadrature(const RewardFunction& f, const Vector& x, int nodes = 64) {
  require(nodes >= 16, "boost_value_quadrature: nodes must be >= 16");
  const QuadratureRule& rule = cached_gauss_legendre_unit(nodes);
  double acc = 0.0;
  for (int k = 0; k < nodes; ++k) {
    const double z = rule.nodes[k];
    acc += rule.weights[k] * std::exp(z - 1.0) / z * f.eval(z * x);
  }
  return acc;
}

}  // namespace ocsm

#endif  // OCSM_FUNCTIONS_HPP_
