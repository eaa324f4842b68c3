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

#ifndef OCSM_CORE_HPP_
#define OCSM_CORE_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace ocsm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// All randomness in the library flows through this engine type so that a
// (seed, platform) pair reproduces every run bit for bit.
using Rng = std::mt19937_64;

// 1 - 1/e, the approximation factor of the boosted gradient and of the
// alpha-regret used throughout.
inline const double kBoostFactor = 1.0 - std::exp(-1.0);

// Thrown when an oracle exceeds its proven step budget or iteration cap.
// Never expected in a correct build; it exists so tests can observe contract
// breaks instead of hanging.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

inline void require_dim(std::ptrdiff_t got, std::ptrdiff_t want,
                        const char* where) {
  if (got != want) {
    throw std::invalid_argument(std::string(where) + ": dimension mismatch (got " +
                                std::to_string(got) + ", expected " +
                                std::to_string(want) + ")");
  }
}

// splitmix64 finalizer; used to derive independent child seeds.
inline std::uint64_t mix_seed(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed for the random stream owned by (node, round) under a master seed.
// Single-learner algorithms use node 0, which is what makes a one-node
// decentralized run reproduce the centralized one.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t node,
                                 std::uint64_t round) {
  return mix_seed(mix_seed(mix_seed(master) ^ node) ^ (round * 0xd1b54a32d192ed03ULL));
}

// Tagged stream for auxiliary purposes (adversary generation and the like),
// kept disjoint from the (node, round) streams by the tag.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                 std::uint64_t index) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return mix_seed(mix_seed(master ^ h) + index);
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace ocsm

#endif  // OCSM_CORE_HPP_
