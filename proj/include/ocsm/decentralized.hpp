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

// Decentralized POBGA over a simulated synchronous gossip network.
//
// Every block is one synchronous round: all nodes snapshot (x^i, y~^i), the
// snapshots are exchanged with neighbours, each node accumulates K local
// boosted gradients, mixes the neighbour snapshots with the weight matrix
// and calls the infeasible projection oracle. Mixing reads only snapshots,
// so the result does not depend on the order in which nodes are processed.

#ifndef OCSM_DECENTRALIZED_HPP_
#define OCSM_DECENTRALIZED_HPP_

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "ocsm/algorithms.hpp"
#include "ocsm/core.hpp"
#include "ocsm/functions.hpp"
#include "ocsm/infeasible_projection.hpp"
#include "ocsm/run_record.hpp"
#include "ocsm/sets.hpp"

namespace ocsm {

struct Graph {
  int nodes = 0;
  std::vector<std::vector<int>> adjacency;  // sorted neighbour lists, no self loops

  std::size_t edge_count() const {
    std::size_t d = 0;
    for (const auto& nb : adjacency) d += nb.size();
    return d / 2;
  }
  int degree(int i) const { return static_cast<int>(adjacency.at(i).size()); }
  bool has_edge(int i, int j) const {
    const auto& nb = adjacency.at(i);
    return std::binary_search(nb.begin(), nb.end(), j);
  }
  bool connected() const {
    if (nodes <= 1) return true;
    std::vector<bool> seen(nodes, false);
    std::vector<int> stack{0};
    seen[0] = true;
    int count = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v : adjacency[u]) {
        if (!seen[v]) {
          seen[v] = true;
          ++count;
          stack.push_back(v);
        }
      }
    }
    return count == nodes;
  }
};

namespace detail {

inline void add_edge(Graph& g, int i, int j) {
  if (i == j || g.has_edge(i, j)) return;
  auto insert = [](std::vector<int>& v, int x) { v.insert(std::lower_bound(v.begin(), v.end(), x), x); };
  insert(g.adjacency[i], j);
  insert(g.adjacency[j], i);
}

}  // namespace detail

// kind is one of complete, cycle, star, grid, path.
inline Graph build_topology(const std::string& kind, int N) {
  require(N >= 2, "build_topology: N must be >= 2");
  Graph g;
  g.nodes = N;
  g.adjacency.assign(N, {});
  if (kind == "complete") {
    for (int i = 0; i < N; ++i)
      for (int j = i + 1; j < N; ++j) detail::add_edge(g, i, j);
  } else if (kind == "cycle") {
    for (int i = 0; i < N; ++i) detail::add_edge(g, i, (i + 1) % N);
  } else if (kind == "path") {
    for (int i = 0; i + 1 < N; ++i) detail::add_edge(g, i, i + 1);
  } else if (kind == "star") {
    for (int i = 1; i < N; ++i) detail::add_edge(g, 0, i);
  } else if (kind == "grid") {
    const auto side = exact_sqrt(N);
    require(side > 0, "build_topology: grid requires N to be a perfect square");
    for (int r = 0; r < side; ++r) {
      for (int c = 0; c < side; ++c) {
        const int i = static_cast<int>(r * side + c);
        if (c + 1 < side) detail::add_edge(g, i, i + 1);
        if (r + 1 < side) detail::add_edge(g, i, static_cast<int>(i + side));
      }
    }
  } else {
    throw std::invalid_argument("build_topology: unknown topology '" + kind + "'");
  }
  return g;
}

// a_ij = 1 / (1 + max(d_i, d_j)) on edges; the diagonal takes the remainder.
inline Matrix metropolis_weights(const Graph& g) {
  require(g.connected(), "metropolis_weights: graph must be connected");
  Matrix A = Matrix::Zero(g.nodes, g.nodes);
  for (int i = 0; i < g.nodes; ++i) {
    for (int j : g.adjacency[i]) {
      A(i, j) = 1.0 / (1.0 + std::max(g.degree(i), g.degree(j)));
    }
  }
  for (int i = 0; i < g.nodes; ++i) {
    double off = 0.0;
    for (int j : g.adjacency[i]) off += A(i, j);
    A(i, i) = 1.0 - off;
  }
  return A;
}

// max(|lambda_2|, |lambda_N|) of a symmetric matrix, eigenvalues sorted
// descending. 0 for a 1 x 1 matrix.
inline double spectral_beta(const Matrix& A) {
  require(A.rows() == A.cols(), "spectral_beta: matrix must be square");
  require(A.size() > 0 && (A - A.transpose()).cwiseAbs().maxCoeff() == 0.0,
          "spectral_beta: matrix must be symmetric");
  if (A.rows() == 1) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(A, Eigen::EigenvaluesOnly);
  const Vector& ev = es.eigenvalues();  // ascending
  const auto N = ev.size();
  return std::max(std::abs(ev(N - 2)), std::abs(ev(0)));
}

struct Network {
  Graph graph;
  Matrix A;
  double beta = 0.0;

  int nodes() const { return graph.nodes; }

  static Network single() {
    Network net;
    net.graph.nodes = 1;
    net.graph.adjacency.assign(1, {});
    net.A = Matrix::Identity(1, 1);
    net.beta = 0.0;
    return net;
  }
  static Network metropolis(const std::string& kind, int N) {
    if (N == 1) return single();
    Network net;
    net.graph = build_topology(kind, N);
    net.A = metropolis_weights(net.graph);
    net.beta = spectral_beta(net.A);
    return net;
  }
};

struct ConsensusGap {
  double max_deviation = 0.0;  // max_i ||y~^i - mean||
  double aggregate = 0.0;      // sqrt(sum_i ||y~^i - mean||^2)
};

inline ConsensusGap consensus_gap(const std::vector<Vector>& states) {
  ConsensusGap gap;
  if (states.size() <= 1) return gap;
  Vector mean = Vector::Zero(states.front().size());
  for (const auto& s : states) mean += s;
  mean /= static_cast<double>(states.size());
  double sum2 = 0.0;
  for (const auto& s : states) {
    const double d2 = (s - mean).squaredNorm();
    sum2 += d2;
    gap.max_deviation = std::max(gap.max_deviation, std::sqrt(d2));
  }
  gap.aggregate = std::sqrt(sum2);
  return gap;
}

// All nodes at the end of one synchronous block round.
struct NetworkBlockEvent {
  std::int64_t block = 0;                    // 1-based
  const std::vector<Vector>* x = nullptr;            // x_m^i
  const std::vector<Vector>* anchors = nullptr;      // y~_m^i
  const std::vector<Vector>* targets = nullptr;      // y_{m+1}^i
  const std::vector<Vector>* next_x = nullptr;       // x_{m+1}^i
  const std::vector<Vector>* next_anchors = nullptr; // y~_{m+1}^i
};
using NetworkObserver = std::function<void(const NetworkBlockEvent&)>;

struct DpobgaResult {
  std::vector<RunRecord> nodes;
  std::int64_t edge_messages = 0;  // point-to-point (x, y~) messages sent
};

// f_{t,i} for node i at round t.
template <class S>
concept NodeRewardSource = requires(const S& s, int node, std::int64_t t) {
  { s(node, t) } -> std::convertible_to<const RewardFunction&>;
};

namespace detail {

// Runs the nodes of each block round in the given order. Every node reads only
// the round's snapshots, so the order cannot change the result.
template <NodeRewardSource Source>
DpobgaResult dpobga_run_ordered(const Network& net, const Source& source, const DecisionSet& set,
                                const PobgaParams& params, const NoiseModel& noise,
                                std::uint64_t master_seed, const NetworkObserver& observer,
                                const std::vector<int>& order) {
  params.validate();
  const int N = net.nodes();
  require(N >= 1, "dpobga_run: network has no nodes");
  require(net.A.rows() == N && net.A.cols() == N, "dpobga_run: weight matrix shape");
  if (N > 1 && !(net.beta < 1.0)) {
    throw std::invalid_argument("dpobga_run: network mixing requires beta < 1");
  }
  require(static_cast<int>(order.size()) == N, "dpobga_run: node order must list every node");

  const auto n = set.dim();
  DpobgaResult out;
  out.nodes.resize(N);
  for (int i = 0; i < N; ++i) {
    detail::begin_record(out.nodes[i], "dpobga", master_seed, params.T, params.K);
    out.nodes[i].node = i;
  }

  std::vector<Vector> x(N, Vector::Zero(n));
  std::vector<Vector> anchor(N, Vector::Zero(n));
  std::vector<Vector> target(N), next_x(N), next_anchor(N);
  std::vector<Counters> c(N);

  for (std::int64_t m = 0; m < params.blocks(); ++m) {
    // x and anchor are the exchanged snapshots for this round.
    for (int i : order) {
      RunRecord& rec = out.nodes[i];
      rec.decisions.push_back(x[i]);
      rec.anchors.push_back(anchor[i]);
      ++c[i].comms;
      out.edge_messages += net.graph.degree(i);

      Rng rng(derive_seed(master_seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(m)));
      Vector acc = Vector::Zero(n);
      for (std::int64_t k = 0; k < params.K; ++k) {
        const std::int64_t t = m * params.K + k;
        const RewardFunction& f = source(i, t);
        acc += boosted_stochastic_grad(f, x[i], noise, rng);
        ++c[i].grad_evals;
        rec.block.push_back(m + 1);
        rec.rewards.push_back(f.eval(x[i]));
        if (k + 1 < params.K) rec.cumulative.push_back(c[i]);
      }

      // Diagonal term first, so a one-node network reproduces POBGA exactly.
      Vector mixed_x = net.A(i, i) * x[i];
      Vector mixed_anchor = net.A(i, i) * anchor[i];
      for (int j : net.graph.adjacency[i]) {
        const double a = net.A(i, j);
        if (a == 0.0) continue;
        mixed_x += a * x[j];
        mixed_anchor += a * anchor[j];
      }
      target[i] = mixed_anchor + params.eta * acc;
      IPResult ip = o_ip(set, mixed_x, target[i], params.eps);
      c[i].lo_steps += ip.lo_steps;
      ++c[i].oip_calls;
      rec.cumulative.push_back(c[i]);
      next_x[i] = std::move(ip.x);
      next_anchor[i] = std::move(ip.y_tilde);
    }
    if (observer) {
      observer(NetworkBlockEvent{m + 1, &x, &anchor, &target, &next_x, &next_anchor});
    }
    std::swap(x, next_x);
    std::swap(anchor, next_anchor);
  }
  for (int i = 0; i < N; ++i) out.nodes[i].totals = c[i];
  return out;
}

}  // namespace detail

template <NodeRewardSource Source>
DpobgaResult dpobga_run(const Network& net, const Source& source, const DecisionSet& set,
                        const PobgaParams& params, const NoiseModel& noise,
                        std::uint64_t master_seed, const NetworkObserver& observer = {}) {
  std::vector<int> order(static_cast<std::size_t>(net.nodes()));
  std::iota(order.begin(), order.end(), 0);
  return detail::dpobga_run_ordered(net, source, set, params, noise, master_seed, observer, order);
}

}  // namespace ocsm

#endif  // OCSM_DECENTRALIZED_HPP_
