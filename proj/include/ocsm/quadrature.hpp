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

#ifndef OCSM_QUADRATURE_HPP_
#define OCSM_QUADRATURE_HPP_

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace ocsm {

// Gauss-Legendre rule mapped to [0, 1]. Being an open rule it never touches
// the endpoints, which is what lets the boosting integrals with a 1/z weight
// be evaluated directly.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline QuadratureRule gauss_legendre_unit(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre_unit: n must be >= 1");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi initial guess for the i-th root of P_n on [-1, 1].
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      // P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Map [-1, 1] -> [0, 1]; store in ascending order.
    rule.nodes[i] = 0.5 * (1.0 - x);
    rule.weights[i] = 0.5 * w;
    rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

// Rules are immutable once built; keep one per order for the process.
inline const QuadratureRule& cached_gauss_legendre_unit(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<const QuadratureRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<const QuadratureRule>(gauss_legendre_unit(n));
  return *slot;
}

}  // namespace ocsm

#endif  // OCSM_QUADRATURE_HPP_
