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

// ocsm_lab: run | sweep | verify.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ocsm/lab.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Online DR-submodular maximization lab"};
  app.require_subcommand(1);

  std::string config_path, out, seeds;
  int threads = 0;
  bool verbose = false;
  app.add_option("--config", config_path, "Experiment config (JSON)");
  app.add_option("--out", out, "Output directory (overrides the config)");
  app.add_option("--seeds", seeds, "Seed list, e.g. 0-9 or 1,4,7 (overrides the config)");
  app.add_option("--threads", threads, "Worker threads (default: $OCSM_LAB_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("-v,--verbose", verbose, "Per-job logging and all verdicts");

  auto* run = app.add_subcommand("run", "Run every (horizon, seed) job and check budgets");
  auto* sweep = app.add_subcommand("sweep", "Run a horizon sweep and fit the regret slope");
  auto* verify = app.add_subcommand("verify", "Run the oracle property suites");
  for (auto* sub : {run, sweep, verify}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    ocsm::ExperimentConfig cfg;
    if (!config_path.empty()) {
      cfg = ocsm::load_config(config_path);
    } else if (!verify->parsed()) {
      std::cerr << "error: --config is required for " << app.get_subcommands().front()->get_name()
                << '\n';
      return ocsm::kExitUsage;
    }
    ocsm::LabOptions opt;
    if (!out.empty()) opt.out = out;
    if (!seeds.empty()) opt.seeds = ocsm::parse_seed_list(seeds);
    opt.threads = threads;
    opt.verbose = verbose;
    if (run->parsed()) return ocsm::cmd_run(cfg, opt);
    if (sweep->parsed()) return ocsm::cmd_sweep(cfg, opt);
    return ocsm::cmd_verify(cfg, opt);
  } catch (const ocsm::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return ocsm::kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return ocsm::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << '\n';
    return ocsm::kExitViolation;
  }
}
