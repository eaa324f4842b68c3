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

// JSON experiment configuration. Every field has a default so that a config
// only needs to name what it changes; serialization always writes the full,
// normalized form, which makes parse(serialize(c)) == c.

#ifndef OCSM_CONFIG_HPP_
#define OCSM_CONFIG_HPP_

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ocsm/algorithms.hpp"
#include "ocsm/core.hpp"
#include "ocsm/decentralized.hpp"
#include "ocsm/harness.hpp"
#include "ocsm/sets.hpp"

namespace ocsm {

using Json = nlohmann::ordered_json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SetSpec {
  std::string kind = "simplex";  // simplex | box | ball
  std::ptrdiff_t n = 2;
  double budget = 1.0;            // simplex
  std::vector<double> cap;        // simplex, optional per-coordinate caps
  std::vector<double> upper;      // box
  double radius = 1.0;            // ball

  DecisionSet build() const {
    auto to_vec = [](const std::vector<double>& v) {
      return Vector(Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())));
    };
    if (kind == "box") return DecisionSet::box(to_vec(upper));
    if (kind == "ball") return DecisionSet::nonneg_ball(n, radius);
    if (cap.empty()) return DecisionSet::budgeted_simplex(n, budget);
    return DecisionSet::budgeted_simplex(budget, to_vec(cap));
  }
  friend bool operator==(const SetSpec&, const SetSpec&) = default;
};

struct ParamSpec {
  std::string mode = "theorem";  // theorem | manual
  double eta = 0.0;
  double eps = 0.0;
  std::int64_t K = 0;
  friend bool operator==(const ParamSpec&, const ParamSpec&) = default;
};

struct NetworkSpec {
  std::string topology = "cycle";
  int nodes = 4;
  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

struct ComparatorSpec {
  int grid = 129;
  std::int64_t stride = 1;  // refresh the prefix comparator every `stride` rounds
  friend bool operator==(const ComparatorSpec&, const ComparatorSpec&) = default;
};

struct VerifySpec {
  std::vector<std::string> suites = {"oip_contract", "unbiasedness", "boosting_inequality",
                                     "weight_matrix", "gradient_check"};
  std::uint64_t seed = 0;
  int oip_calls = 1000;
  int fejer_points = 100;
  int unbiased_points = 20;
  int unbiased_draws = 100000;
  int boosting_instances = 10;
  int boosting_pairs = 1000;
  friend bool operator==(const VerifySpec&, const VerifySpec&) = default;
};

inline const std::vector<std::string>& known_suites() {
  static const std::vector<std::string> s = {"oip_contract", "unbiasedness",
                                             "boosting_inequality", "weight_matrix",
                                             "gradient_check"};
  return s;
}

inline bool adversary_equal(const AdversarySpec& a, const AdversarySpec& b) {
  return a.family == b.family && a.n == b.n && a.regenerate == b.regenerate &&
         a.sigma == b.sigma && a.salt == b.salt && a.curvature == b.curvature &&
         a.slack == b.slack && a.sets == b.sets;
}

struct ExperimentConfig {
  std::string name = "experiment";
  std::string algorithm = "pobga";  // pobga | dpobga | oga | obga
  SetSpec set;
  AdversarySpec adversary;
  std::vector<std::int64_t> horizons = {256};
  ParamSpec params;
  NetworkSpec network;
  std::vector<std::uint64_t> seeds = {0};
  ComparatorSpec comparator;
  double alpha = kBoostFactor;
  std::string out = "out";
  VerifySpec verify;

  friend bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    return a.name == b.name && a.algorithm == b.algorithm && a.set == b.set &&
           adversary_equal(a.adversary, b.adversary) && a.horizons == b.horizons &&
           a.params == b.params && a.network == b.network && a.seeds == b.seeds &&
           a.comparator == b.comparator && a.alpha == b.alpha && a.out == b.out &&
           a.verify == b.verify;
  }
};

namespace detail {

// Best-effort source line of a JSON pointer such as "/params/K": walks the
// path keys in order through the raw text. Returns 0 when not found.
inline int line_of(const std::string& text, const std::string& pointer) {
  if (text.empty()) return 0;
  std::size_t pos = 0;
  std::stringstream ss(pointer);
  std::string key;
  bool any = false;
  while (std::getline(ss, key, '/')) {
    if (key.empty() || std::all_of(key.begin(), key.end(), ::isdigit)) continue;
    const std::size_t hit = text.find('"' + key + '"', pos);
    if (hit == std::string::npos) break;
    pos = hit;
    any = true;
  }
  if (!any) return 0;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + pos, '\n'));
}

class Reader {
 public:
  explicit Reader(const std::string& text) : text_(text) {}

  [[noreturn]] void fail(const std::string& pointer, const std::string& msg) const {
    std::string where = pointer.empty() ? "/" : pointer;
    const int line = line_of(text_, pointer);
    if (line > 0) where = "line " + std::to_string(line) + " (" + where + ")";
    throw ConfigError("config " + where + ": " + msg);
  }

  void check_keys(const Json& obj, const std::string& pointer,
                  std::initializer_list<const char*> allowed) const {
    if (!obj.is_object()) fail(pointer, "expected an object");
    for (const auto& [k, v] : obj.items()) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || k == a;
      if (!ok) fail(pointer + "/" + k, "unknown key '" + k + "'");
    }
  }

  template <class T>
  void get(const Json& obj, const std::string& pointer, const char* key, T& out) const {
    if (!obj.contains(key)) return;
    const std::string p = pointer + "/" + key;
    try {
      const Json& v = obj.at(key);
      if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) fail(p, "expected a string");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) fail(p, "expected a number");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) fail(p, "expected an integer");
        if constexpr (std::is_unsigned_v<T>) {
          if (v.is_number_integer() && !v.is_number_unsigned()) fail(p, "expected a nonnegative integer");
        }
      } else {
        if (!v.is_array()) fail(p, "expected an array");
        using E = typename T::value_type;
        for (std::size_t i = 0; i < v.size(); ++i) {
          const std::string pi = p + "/" + std::to_string(i);
          if constexpr (std::is_integral_v<E>) {
            if (!v[i].is_number_integer()) fail(pi, "expected an integer");
            if (std::is_unsigned_v<E> && !v[i].is_number_unsigned()) {
              fail(pi, "expected a nonnegative integer");
            }
          } else if constexpr (std::is_floating_point_v<E>) {
            if (!v[i].is_number()) fail(pi, "expected a number");
          }
        }
      }
      out = v.get<T>();
    } catch (const nlohmann::json::exception& e) {
      fail(p, e.what());
    }
  }

 private:
  const std::string& text_;
};

}  // namespace detail

inline Json to_json(const ExperimentConfig& c) {
  Json set = {{"kind", c.set.kind}};
  if (c.set.kind == "simplex") {
    set["n"] = c.set.n;
    set["budget"] = c.set.budget;
    if (!c.set.cap.empty()) set["cap"] = c.set.cap;
  } else if (c.set.kind == "box") {
    set["upper"] = c.set.upper;
  } else {
    set["n"] = c.set.n;
    set["radius"] = c.set.radius;
  }
  Json params = {{"mode", c.params.mode}};
  if (c.params.mode == "manual") {
    params["eta"] = c.params.eta;
    params["eps"] = c.params.eps;
    params["K"] = c.params.K;
  } else if (c.params.eta > 0.0) {
    params["eta"] = c.params.eta;  // baseline step override
  }
  const auto& a = c.adversary;
  return Json{{"name", c.name},
              {"algorithm", c.algorithm},
              {"set", set},
              {"adversary",
               {{"family", a.family},
                {"regenerate", a.regenerate},
                {"sigma", a.sigma},
                {"salt", a.salt},
                {"curvature", a.curvature},
                {"slack", a.slack},
                {"sets", a.sets}}},
              {"horizons", c.horizons},
              {"params", params},
              {"network", {{"topology", c.network.topology}, {"nodes", c.network.nodes}}},
              {"seeds", c.seeds},
              {"comparator", {{"grid", c.comparator.grid}, {"stride", c.comparator.stride}}},
              {"alpha", c.alpha},
              {"out", c.out},
              {"verify",
               {{"suites", c.verify.suites},
                {"seed", c.verify.seed},
                {"oip_calls", c.verify.oip_calls},
                {"fejer_points", c.verify.fejer_points},
                {"unbiased_points", c.verify.unbiased_points},
                {"unbiased_draws", c.verify.unbiased_draws},
                {"boosting_instances", c.verify.boosting_instances},
                {"boosting_pairs", c.verify.boosting_pairs}}}};
}

inline std::string serialize(const ExperimentConfig& c) { return to_json(c).dump(2) + "\n"; }

// Semantic checks that need the whole config. `text` is only used to point
// error messages at a source line.
inline void validate(const ExperimentConfig& c, const std::string& text = {}) {
  const detail::Reader r(text);
  const std::vector<std::string> algos = {"pobga", "dpobga", "oga", "obga"};
  if (std::find(algos.begin(), algos.end(), c.algorithm) == algos.end()) {
    r.fail("/algorithm", "must be one of pobga, dpobga, oga, obga");
  }
  try {
    const DecisionSet set = c.set.build();
    AdversarySpec spec = c.adversary;
    spec.n = set.dim();
    spec.validate();
    if (spec.family == "coverage" && set.coordinatewise_max().maxCoeff() > 1.0 + 1e-12) {
      r.fail("/adversary/family", "coverage rewards need a decision set inside [0, 1]^n");
    }
    if (set.dim() > kMaxGridDim) {
      r.fail("/set", "dimension " + std::to_string(set.dim()) +
                         " too large for the grid comparator (max 4)");
    }
  } catch (const std::invalid_argument& e) {
    r.fail("/set", e.what());
  }
  if (c.set.kind != "simplex" && c.set.kind != "box" && c.set.kind != "ball") {
    r.fail("/set/kind", "must be one of simplex, box, ball");
  }
  if (c.horizons.empty()) r.fail("/horizons", "at least one horizon is required");
  for (std::int64_t T : c.horizons) {
    if (T <= 0) r.fail("/horizons", "horizons must be positive");
  }
  if (c.params.mode == "theorem") {
    if (c.algorithm == "pobga" || c.algorithm == "dpobga") {
      for (std::int64_t T : c.horizons) {
        if (exact_sqrt(T) < 0) {
          r.fail("/horizons", "T must be a perfect square (got " + std::to_string(T) + ")");
        }
      }
    }
  } else if (c.params.mode == "manual") {
    if (!(c.params.eta > 0.0)) r.fail("/params/eta", "manual mode needs eta > 0");
    if (c.algorithm == "pobga" || c.algorithm == "dpobga") {
      if (!(c.params.eps > 0.0)) r.fail("/params/eps", "manual mode needs eps > 0");
      if (c.params.K <= 0) r.fail("/params/K", "manual mode needs K > 0");
      for (std::int64_t T : c.horizons) {
        if (T % c.params.K != 0) {
          r.fail("/params/K", "K must divide T (K=" + std::to_string(c.params.K) +
                                  ", T=" + std::to_string(T) + ")");
        }
      }
    }
  } else {
    r.fail("/params/mode", "must be 'theorem' or 'manual'");
  }
  if (c.algorithm == "dpobga") {
    if (c.network.nodes < 1) r.fail("/network/nodes", "must be >= 1");
    if (c.network.nodes > 1) {
      try {
        build_topology(c.network.topology, c.network.nodes);
      } catch (const std::invalid_argument& e) {
        r.fail("/network", e.what());
      }
    }
  }
  if (c.seeds.empty()) r.fail("/seeds", "at least one seed is required");
  if (c.comparator.grid < 32) r.fail("/comparator/grid", "must be >= 32 points per axis");
  if (c.comparator.stride < 1) r.fail("/comparator/stride", "must be >= 1");
  if (!(c.alpha > 0.0 && c.alpha <= 1.0)) r.fail("/alpha", "must lie in (0, 1]");
  for (const auto& s : c.verify.suites) {
    const auto& k = known_suites();
    if (std::find(k.begin(), k.end(), s) == k.end()) {
      r.fail("/verify/suites", "unknown suite '" + s + "'");
    }
  }
  if (c.verify.oip_calls < 1 || c.verify.fejer_points < 1 || c.verify.unbiased_points < 1 ||
      c.verify.unbiased_draws < 2 || c.verify.boosting_instances < 1 ||
      c.verify.boosting_pairs < 1) {
    r.fail("/verify", "suite sizes must be positive");
  }
}

inline ExperimentConfig parse_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // Convert the byte offset into line:column.
    const std::size_t off = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + off, '\n');
    const auto nl = text.rfind('\n', off == 0 ? 0 : off - 1);
    const auto col = nl == std::string::npos ? off + 1 : off - nl;
    throw ConfigError("config line " + std::to_string(line) + ", column " + std::to_string(col) +
                      ": JSON syntax error");
  }
  const detail::Reader r(text);
  r.check_keys(j, "", {"name", "algorithm", "set", "adversary", "horizons", "params", "network",
                       "seeds", "comparator", "alpha", "out", "verify"});
  ExperimentConfig c;
  r.get(j, "", "name", c.name);
  r.get(j, "", "algorithm", c.algorithm);
  if (j.contains("set")) {
    const Json& s = j.at("set");
    r.check_keys(s, "/set", {"kind", "n", "budget", "cap", "upper", "radius"});
    r.get(s, "/set", "kind", c.set.kind);
    r.get(s, "/set", "n", c.set.n);
    r.get(s, "/set", "budget", c.set.budget);
    r.get(s, "/set", "cap", c.set.cap);
    r.get(s, "/set", "upper", c.set.upper);
    r.get(s, "/set", "radius", c.set.radius);
    if (c.set.kind == "box") {
      if (c.set.upper.empty()) r.fail("/set/upper", "box sets need 'upper'");
      c.set.n = static_cast<std::ptrdiff_t>(c.set.upper.size());
    }
    if (c.set.kind == "simplex" && !c.set.cap.empty()) {
      c.set.n = static_cast<std::ptrdiff_t>(c.set.cap.size());
    }
  }
  if (c.set.kind != "box") c.set.upper.clear();
  if (c.set.kind != "simplex") c.set.cap.clear();
  if (c.set.kind != "simplex") c.set.budget = 1.0;
  if (c.set.kind != "ball") c.set.radius = 1.0;
  if (j.contains("adversary")) {
    const Json& a = j.at("adversary");
    r.check_keys(a, "/adversary",
                 {"family", "regenerate", "sigma", "salt", "curvature", "slack", "sets"});
    r.get(a, "/adversary", "family", c.adversary.family);
    r.get(a, "/adversary", "regenerate", c.adversary.regenerate);
    r.get(a, "/adversary", "sigma", c.adversary.sigma);
    r.get(a, "/adversary", "salt", c.adversary.salt);
    r.get(a, "/adversary", "curvature", c.adversary.curvature);
    r.get(a, "/adversary", "slack", c.adversary.slack);
    r.get(a, "/adversary", "sets", c.adversary.sets);
  }
  c.adversary.n = c.set.n;
  r.get(j, "", "horizons", c.horizons);
  if (j.contains("params")) {
    const Json& p = j.at("params");
    r.check_keys(p, "/params", {"mode", "eta", "eps", "K"});
    r.get(p, "/params", "mode", c.params.mode);
    r.get(p, "/params", "eta", c.params.eta);
    r.get(p, "/params", "eps", c.params.eps);
    r.get(p, "/params", "K", c.params.K);
  }
  if (c.params.mode == "theorem") {
    c.params.eps = 0.0;
    c.params.K = 0;
  }
  if (j.contains("network")) {
    const Json& n = j.at("network");
    r.check_keys(n, "/network", {"topology", "nodes"});
    r.get(n, "/network", "topology", c.network.topology);
    r.get(n, "/network", "nodes", c.network.nodes);
  }
  r.get(j, "", "seeds", c.seeds);
  if (j.contains("comparator")) {
    const Json& cmp = j.at("comparator");
    r.check_keys(cmp, "/comparator", {"grid", "stride"});
    r.get(cmp, "/comparator", "grid", c.comparator.grid);
    r.get(cmp, "/comparator", "stride", c.comparator.stride);
  }
  r.get(j, "", "alpha", c.alpha);
  r.get(j, "", "out", c.out);
  if (j.contains("verify")) {
    const Json& v = j.at("verify");
    r.check_keys(v, "/verify",
                 {"suites", "seed", "oip_calls", "fejer_points", "unbiased_points",
                  "unbiased_draws", "boosting_instances", "boosting_pairs"});
    r.get(v, "/verify", "suites", c.verify.suites);
    r.get(v, "/verify", "seed", c.verify.seed);
    r.get(v, "/verify", "oip_calls", c.verify.oip_calls);
    r.get(v, "/verify", "fejer_points", c.verify.fejer_points);
    r.get(v, "/verify", "unbiased_points", c.verify.unbiased_points);
    r.get(v, "/verify", "unbiased_draws", c.verify.unbiased_draws);
    r.get(v, "/verify", "boosting_instances", c.verify.boosting_instances);
    r.get(v, "/verify", "boosting_pairs", c.verify.boosting_pairs);
  }
  validate(c, text);
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

// "0,1,5" or "0-9" or a mix ("0-3,7").
inline std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  auto number = [&](const std::string& s) -> std::uint64_t {
    if (s.empty() || !std::all_of(s.begin(), s.end(), ::isdigit)) {
      throw ConfigError("--seeds: '" + s + "' is not a nonnegative integer");
    }
    return std::stoull(s);
  };
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) {
      out.push_back(number(item));
      continue;
    }
    const std::uint64_t lo = number(item.substr(0, dash));
    const std::uint64_t hi = number(item.substr(dash + 1));
    if (hi < lo) throw ConfigError("--seeds: empty range '" + item + "'");
    for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
  }
  if (out.empty()) throw ConfigError("--seeds: no seeds given");
  return out;
}

}  // namespace ocsm

#endif  // OCSM_CONFIG_HPP_
