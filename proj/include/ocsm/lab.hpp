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

// Experiment driver behind the ocsm_lab tool: expands a config into
// (horizon, seed) jobs, runs them on a small thread pool, and writes CSV
// traces, a JSON summary, and budget verdicts.

#ifndef OCSM_LAB_HPP_
#define OCSM_LAB_HPP_

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ocsm/algorithms.hpp"
#include "ocsm/config.hpp"
#include "ocsm/decentralized.hpp"
#include "ocsm/harness.hpp"
#include "ocsm/verify.hpp"

namespace ocsm {

enum ExitCode : int { kExitOk = 0, kExitViolation = 1, kExitUsage = 2 };

struct LabOptions {
  std::optional<std::string> out;                   // overrides config.out
  std::optional<std::vector<std::uint64_t>> seeds;  // overrides config.seeds
  int threads = 0;                                  // 0: env or hardware
  bool verbose = false;
  std::ostream* log = &std::cout;
};

// --threads, else OCSM_LAB_THREADS, else the hardware concurrency.
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("OCSM_LAB_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs fn(i) for i in [0, count) on `threads` workers. Exceptions are
// rethrown on the caller's thread (the first one wins).
template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(count)));
  {
    std::vector<std::jthread> pool;
    for (int t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
  }
  if (error) std::rethrow_exception(error);
}

struct Verdict {
  std::string name;
  bool pass = true;
  bool gating = true;  // informational verdicts never change the exit code
  std::string detail;
};

struct JobResult {
  std::int64_t T = 0;
  std::uint64_t seed = 0;
  PobgaParams params;  // eta only for baselines
  double R = 0.0;
  double G = 0.0;
  double beta = 0.0;
  std::vector<RunRecord> records;  // one per node (one for single-learner runs)
  std::vector<Verdict> verdicts;

  double mean_final_regret() const {
    double s = 0.0;
    for (const auto& r : records) s += r.alpha_regret.back();
    return s / static_cast<double>(records.size());
  }
};

inline std::string run_id(const std::string& algorithm, std::int64_t T, std::uint64_t seed) {
  return algorithm + "-T" + std::to_string(T) + "-s" + std::to_string(seed);
}

namespace detail {

inline void check_record(const RunRecord& rec, const DecisionSet& set, const PobgaParams& p,
                         bool theorem, bool learner_blocks, std::vector<Verdict>& out,
                         const std::string& who) {
  bool feasible = true;
  for (const auto& x : rec.decisions) feasible = feasible && set.contains(x, 1e-9);
  out.push_back({who + "feasible", feasible, true, ""});
  if (learner_blocks) {
    bool bounded = true;
    for (const auto& y : rec.anchors) bounded = bounded && y.norm() <= set.radius() + 1e-9;
    out.push_back({who + "anchor_norm", bounded, true, ""});
    const std::int64_t lo = rec.totals.lo_steps;
    out.push_back({who + "lo_steps<=T", lo <= rec.T, theorem,
                   std::to_string(lo) + " <= " + std::to_string(rec.T) +
                       (theorem ? "" : " (manual parameters: informational)")});
    out.push_back({who + "oip_calls=T/K", rec.totals.oip_calls == p.blocks(), true,
                   std::to_string(rec.totals.oip_calls)});
  } else {
    out.push_back({who + "projections=T", rec.totals.projections == rec.T, true,
                   std::to_string(rec.totals.projections)});
  }
  out.push_back({who + "grad_evals=T", rec.totals.grad_evals == rec.T, true,
                 std::to_string(rec.totals.grad_evals)});
}

}  // namespace detail

// One (T, seed) job of the configured algorithm, including the comparator,
// the regret trace, and invariant verdicts.
inline JobResult run_job(const ExperimentConfig& cfg, std::int64_t T, std::uint64_t seed) {
  JobResult job;
  job.T = T;
  job.seed = seed;
  const DecisionSet set = cfg.set.build();
  job.R = set.radius();
  AdversarySpec spec = cfg.adversary;
  spec.n = set.dim();
  const bool theorem = cfg.params.mode == "theorem";
  const auto& algo = cfg.algorithm;

  if (algo == "dpobga") {
    const Network net = Network::metropolis(cfg.network.topology, cfg.network.nodes);
    job.beta = net.beta;
    const NetworkAdversary adv(spec, set, T, seed, net.nodes());
    job.G = adv.bound().G;
    job.params = theorem ? pobga_params_from_theorem(T, job.R, job.G)
                         : PobgaParams{T, cfg.params.K, cfg.params.eta, cfg.params.eps};
    DpobgaResult res = dpobga_run(net, adv, set, job.params, NoiseModel{spec.sigma}, seed);
    decentralized_regret(res.nodes, adv, set, cfg.comparator.grid, cfg.alpha,
                         cfg.comparator.stride);
    for (const auto& rec : res.nodes) {
      const std::string who = "node" + std::to_string(rec.node) + ".";
      detail::check_record(rec, set, job.params, theorem, true, job.verdicts, who);
      job.verdicts.push_back({who + "comms=T/K", rec.totals.comms == job.params.blocks(), true,
                              std::to_string(rec.totals.comms) + " = " +
                                  std::to_string(job.params.blocks())});
    }
    job.records = std::move(res.nodes);
    return job;
  }

  const Adversary adv(spec, set, T, seed);
  job.G = adv.bound().G;
  RunRecord rec;
  if (algo == "pobga") {
    job.params = theorem ? pobga_params_from_theorem(T, job.R, job.G)
                         : PobgaParams{T, cfg.params.K, cfg.params.eta, cfg.params.eps};
    rec = pobga_run(adv, set, job.params, adv.noise(), seed);
  } else {
    // Baselines: the usual R / (G sqrt T) step unless one is given.
    const double eta = cfg.params.eta > 0.0
                           ? cfg.params.eta
                           : job.R / (job.G * std::sqrt(static_cast<double>(T)));
    job.params = PobgaParams{T, 1, eta, 0.0};
    rec = algo == "oga" ? oga_run(adv, set, T, eta, adv.noise(), seed)
                        : obga_run(adv, set, T, eta, adv.noise(), seed);
  }
  const std::vector<double> prefix =
      prefix_best(adv, set, cfg.comparator.grid, T, cfg.comparator.stride);
  rec.alpha_regret = alpha_regret(rec, prefix, cfg.alpha);
  rec.comparator = prefix.back();
  detail::check_record(rec, set, job.params, theorem, algo == "pobga", job.verdicts, "");
  job.records.push_back(std::move(rec));
  return job;
}

struct LabSummary {
  std::vector<JobResult> jobs;
  bool ok = true;
};

namespace detail {

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}
inline double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

inline Json counters_json(const Counters& c) {
  return {{"grad_evals", c.grad_evals},
          {"lo_steps", c.lo_steps},
          {"projections", c.projections},
          {"comms", c.comms},
          {"oip_calls", c.oip_calls}};
}

inline LabSummary execute(const ExperimentConfig& cfg, const LabOptions& opt) {
  struct Task {
    std::int64_t T;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (std::int64_t T : cfg.horizons) {
    for (std::uint64_t s : cfg.seeds) tasks.push_back({T, s});
  }
  LabSummary sum;
  sum.jobs.resize(tasks.size());
  std::mutex log_mu;
  parallel_for(tasks.size(), resolve_threads(opt.threads), [&](std::size_t i) {
    sum.jobs[i] = run_job(cfg, tasks[i].T, tasks[i].seed);
    if (opt.verbose) {
      std::lock_guard<std::mutex> lock(log_mu);
      const auto& j = sum.jobs[i];
      *opt.log << "[job] " << run_id(cfg.algorithm, j.T, j.seed) << " regret=" << std::setprecision(6)
               << j.mean_final_regret() << " lo_steps=" << j.records.front().totals.lo_steps << '\n';
    }
  });
  for (const auto& j : sum.jobs) {
    for (const auto& v : j.verdicts) {
      if (v.gating && !v.pass) sum.ok = false;
    }
  }
  return sum;
}

inline void write_outputs(const ExperimentConfig& cfg, const LabSummary& sum,
                          const std::filesystem::path& dir, Json extra, std::ostream& log) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  if (cfg.algorithm == "dpobga") {
    for (int node = 0; node < cfg.network.nodes; ++node) {
      const auto path = dir / ("node_" + std::to_string(node) + ".csv");
      std::ofstream os(path);
      os << kCsvHeader << '\n';
      for (const auto& j : sum.jobs) {
        write_csv_rows(os, run_id(cfg.algorithm, j.T, j.seed) + "-n" + std::to_string(node),
                       j.records.at(node));
      }
      written.push_back(path);
    }
  } else {
    const auto path = dir / "runs.csv";
    std::ofstream os(path);
    os << kCsvHeader << '\n';
    for (const auto& j : sum.jobs) write_csv_rows(os, run_id(cfg.algorithm, j.T, j.seed), j.records[0]);
    written.push_back(path);
  }

  Json runs = Json::array();
  for (const auto& j : sum.jobs) {
    Json nodes = Json::array();
    for (const auto& r : j.records) {
      nodes.push_back({{"node", r.node},
                       {"total_reward", r.total_reward()},
                       {"comparator", r.comparator},
                       {"alpha_regret", r.alpha_regret.back()},
                       {"counters", counters_json(r.totals)}});
    }
    Json verdicts = Json::array();
    for (const auto& v : j.verdicts) {
      verdicts.push_back({{"name", v.name}, {"pass", v.pass}, {"gating", v.gating}, {"detail", v.detail}});
    }
    runs.push_back({{"run_id", run_id(cfg.algorithm, j.T, j.seed)},
                    {"T", j.T},
                    {"seed", j.seed},
                    {"K", j.params.K},
                    {"eta", j.params.eta},
                    {"eps", j.params.eps},
                    {"R", j.R},
                    {"G", j.G},
                    {"beta", j.beta},
                    {"nodes", nodes},
                    {"verdicts", verdicts}});
  }
  Json horizons = Json::array();
  for (std::int64_t T : cfg.horizons) {
    std::vector<double> finals;
    for (const auto& j : sum.jobs) {
      if (j.T == T) finals.push_back(j.mean_final_regret());
    }
    horizons.push_back({{"T", T},
                        {"runs", finals.size()},
                        {"mean_alpha_regret", mean_of(finals)},
                        {"std_alpha_regret", std_of(finals)},
                        {"mean_regret_over_T", mean_of(finals) / static_cast<double>(T)}});
  }
  Json summary = {{"config", to_json(cfg)},
                  {"alpha", cfg.alpha},
                  {"pass", sum.ok},
                  {"horizons", horizons},
                  {"runs", runs}};
  for (auto& [k, v] : extra.items()) summary[k] = v;
  const auto spath = dir / "summary.json";
  std::ofstream(spath) << summary.dump(2) << '\n';
  written.push_back(spath);
  for (const auto& p : written) log << "wrote " << p.string() << '\n';
}

inline void print_verdicts(const ExperimentConfig& cfg, const LabSummary& sum, bool verbose,
                           std::ostream& log) {
  for (const auto& j : sum.jobs) {
    // Budget verdicts are always printed; the rest only when they fail or in
    // verbose mode.
    for (const auto& v : j.verdicts) {
      const bool budget = v.name.find("lo_steps") != std::string::npos ||
                          v.name.find("comms") != std::string::npos;
      if (!budget && v.pass && !verbose) continue;
      log << (v.pass ? "PASS " : (v.gating ? "FAIL " : "INFO ")) << run_id(cfg.algorithm, j.T, j.seed)
          << ' ' << v.name << (v.detail.empty() ? "" : " [" + v.detail + "]") << '\n';
    }
  }
}

}  // namespace detail

inline ExperimentConfig apply_options(ExperimentConfig cfg, const LabOptions& opt) {
  if (opt.out) cfg.out = *opt.out;
  if (opt.seeds) cfg.seeds = *opt.seeds;
  validate(cfg);
  return cfg;
}

inline int cmd_run(const ExperimentConfig& base, const LabOptions& opt) {
  const ExperimentConfig cfg = apply_options(base, opt);
  std::ostream& log = *opt.log;
  const LabSummary sum = detail::execute(cfg, opt);
  detail::print_verdicts(cfg, sum, opt.verbose, log);
  for (std::int64_t T : cfg.horizons) {
    std::vector<double> finals;
    for (const auto& j : sum.jobs) {
      if (j.T == T) finals.push_back(j.mean_final_regret());
    }
    log << "T=" << T << " mean alpha-regret " << std::setprecision(6) << detail::mean_of(finals)
        << " (std " << detail::std_of(finals) << ", " << finals.size() << " seeds)\n";
  }
  detail::write_outputs(cfg, sum, cfg.out, Json::object(), log);
  log << (sum.ok ? "run: all invariants hold\n" : "run: invariant violations (see FAIL lines)\n");
  return sum.ok ? kExitOk : kExitViolation;
}

inline int cmd_sweep(const ExperimentConfig& base, const LabOptions& opt) {
  const ExperimentConfig cfg = apply_options(base, opt);
  std::ostream& log = *opt.log;
  if (cfg.horizons.size() < 2) {
    throw ConfigError("config /horizons: sweep needs at least two horizons");
  }
  const LabSummary sum = detail::execute(cfg, opt);
  detail::print_verdicts(cfg, sum, opt.verbose, log);

  std::vector<std::pair<double, double>> pairs;
  std::ofstream table_csv;
  std::filesystem::create_directories(cfg.out);
  table_csv.open(std::filesystem::path(cfg.out) / "slope.csv");
  table_csv << "T,runs,mean_alpha_regret,std_alpha_regret,regret_over_T\n" << std::setprecision(17);
  log << std::left << std::setw(10) << "T" << std::setw(8) << "runs" << std::setw(18)
      << "mean_regret" << std::setw(16) << "std" << "regret/T\n";
  for (std::int64_t T : cfg.horizons) {
    std::vector<double> finals;
    for (const auto& j : sum.jobs) {
      if (j.T == T) finals.push_back(j.mean_final_regret());
    }
    const double m = detail::mean_of(finals), s = detail::std_of(finals);
    pairs.emplace_back(static_cast<double>(T), m);
    table_csv << T << ',' << finals.size() << ',' << m << ',' << s << ',' << m / T << '\n';
    log << std::setw(10) << T << std::setw(8) << finals.size() << std::setw(18)
        << std::setprecision(8) << m << std::setw(16) << s << m / T << '\n';
  }
  const SlopeFit fit = slope_estimate(pairs);
  log << "log-log slope: " << std::setprecision(6) << fit.slope << " (" << fit.used
      << " horizons)\n";
  for (const auto& w : fit.warnings) log << "warning: " << w << '\n';
  Json warnings = fit.warnings;
  Json extra = {{"slope",
                 {{"value", std::isfinite(fit.slope) ? Json(fit.slope) : Json(nullptr)},
                  {"intercept", std::isfinite(fit.intercept) ? Json(fit.intercept) : Json(nullptr)},
                  {"used", fit.used},
                  {"warnings", warnings}}}};
  log << "wrote " << (std::filesystem::path(cfg.out) / "slope.csv").string() << '\n';
  detail::write_outputs(cfg, sum, cfg.out, extra, log);
  log << (sum.ok ? "sweep: all invariants hold\n" : "sweep: invariant violations (see FAIL lines)\n");
  return sum.ok ? kExitOk : kExitViolation;
}

inline int cmd_verify(const ExperimentConfig& base, const LabOptions& opt,
                      const OipOracle& oracle = default_oip_oracle()) {
  ExperimentConfig cfg = base;
  if (opt.out) cfg.out = *opt.out;
  if (opt.seeds) cfg.verify.seed = opt.seeds->front();
  std::ostream& log = *opt.log;
  const VerifyReport rep = run_verify(cfg.verify, oracle);
  const std::string text = rep.text();
  log << text;
  std::filesystem::create_directories(cfg.out);
  std::ofstream(std::filesystem::path(cfg.out) / "verify_report.txt") << text;
  Json j = rep.json();
  j["seed"] = cfg.verify.seed;
  std::ofstream(std::filesystem::path(cfg.out) / "verify.json") << j.dump(2) << '\n';
  return rep.all_pass() ? kExitOk : kExitViolation;
}

}  // namespace ocsm

#endif  // OCSM_LAB_HPP_
