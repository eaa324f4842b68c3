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

#include "ocsm/lab.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

namespace ocsm {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ocsm_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t line_count(const fs::path& p) {
  const std::string s = slurp(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

LabOptions quiet(std::ostringstream& sink, const fs::path& out) {
  LabOptions opt;
  opt.out = out.string();
  opt.log = &sink;
  opt.threads = 2;
  return opt;
}

VerifySpec small_verify() {
  VerifySpec v;
  v.oip_calls = 120;
  v.fejer_points = 30;
  v.unbiased_points = 4;
  v.unbiased_draws = 5000;
  v.boosting_instances = 2;
  v.boosting_pairs = 50;
  return v;
}

TEST(Config, RoundTripIsIdentity) {
  for (const char* text : {
           R"({"algorithm": "pobga"})",
           R"({"algorithm": "dpobga", "network": {"topology": "grid", "nodes": 9},
               "set": {"kind": "simplex", "budget": 0.8, "cap": [0.5, 0.4, 0.6]},
               "horizons": [256, 4096], "seeds": [3, 1]})",
           R"({"algorithm": "oga", "set": {"kind": "box", "upper": [1, 0.5]},
               "adversary": {"family": "coverage", "sets": 6, "sigma": 0}, "params": {"eta": 0.02}})",
           R"({"algorithm": "pobga", "set": {"kind": "ball", "n": 3, "radius": 2},
               "params": {"mode": "manual", "eta": 0.1, "eps": 0.01, "K": 10}, "horizons": [100],
               "comparator": {"grid": 40, "stride": 5}, "alpha": 1.0,
               "verify": {"suites": ["weight_matrix"], "seed": 9}})"}) {
    const ExperimentConfig a = parse_config(text);
    const std::string s = serialize(a);
    const ExperimentConfig b = parse_config(s);
    EXPECT_TRUE(a == b) << s;
    EXPECT_EQ(serialize(b), s);
  }
}

TEST(Config, RejectsNonSquareHorizonInTheoremMode) {
  try {
    parse_config("{\n  \"algorithm\": \"pobga\",\n  \"horizons\": [1000]\n}");
    FAIL() << "accepted T=1000";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("T must be a perfect square"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(Config, ErrorsCarryLineNumbers) {
  auto message = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message("{\n\"horizons\": [256,\n}").find("line 3"), std::string::npos);
  EXPECT_NE(message("{\n\"algorithm\": \"pobga\",\n\"bogus\": 1}").find("line 3"), std::string::npos);
  EXPECT_NE(message("{\"params\": {\"mode\": \"manual\", \"eta\": 0.1, \"eps\": 0.1, \"K\": 7}}")
                .find("K must divide T"),
            std::string::npos);
  EXPECT_NE(message("{\"algorithm\": \"dpobga\", \"network\": {\"topology\": \"grid\", \"nodes\": 5}}")
                .find("perfect square"),
            std::string::npos);
  EXPECT_NE(message("{\"set\": {\"kind\": \"simplex\", \"n\": 5}}").find("too large"),
            std::string::npos);
  EXPECT_NE(message("{\"adversary\": {\"family\": \"coverage\"}, \"set\": {\"kind\": \"ball\", \"radius\": 2}}")
                .find("[0, 1]^n"),
            std::string::npos);
  EXPECT_NE(message("{\"seeds\": [-1]}").find("nonnegative"), std::string::npos);
}

TEST(Config, SeedLists) {
  EXPECT_EQ(parse_seed_list("0-3,7"), (std::vector<std::uint64_t>{0, 1, 2, 3, 7}));
  EXPECT_EQ(parse_seed_list("5"), (std::vector<std::uint64_t>{5}));
  EXPECT_THROW(parse_seed_list("3-1"), ConfigError);
  EXPECT_THROW(parse_seed_list("a"), ConfigError);
}

TEST(Config, ThreadFallbackUsesEnvironment) {
  EXPECT_EQ(resolve_threads(3), 3);
  ::setenv("OCSM_LAB_THREADS", "5", 1);
  EXPECT_EQ(resolve_threads(0), 5);
  ::setenv("OCSM_LAB_THREADS", "junk", 1);
  EXPECT_GE(resolve_threads(0), 1);
  ::unsetenv("OCSM_LAB_THREADS");
}

TEST(CmdRun, MinimalPobgaWritesTraceAndSummary) {
  const fs::path out = scratch("run");
  std::ostringstream log;
  const ExperimentConfig cfg = parse_config(R"({"algorithm": "pobga", "horizons": [256]})");
  EXPECT_EQ(cmd_run(cfg, quiet(log, out)), kExitOk);
  EXPECT_EQ(line_count(out / "runs.csv"), 257u);  // header + 256 rows
  EXPECT_EQ(slurp(out / "runs.csv").rfind(kCsvHeader, 0), 0u);
  const Json summary = Json::parse(slurp(out / "summary.json"));
  EXPECT_TRUE(summary["pass"].get<bool>());
  EXPECT_EQ(summary["runs"].size(), 1u);
  EXPECT_EQ(summary["runs"][0]["K"].get<int>(), 16);
  EXPECT_NE(log.str().find("lo_steps<=T"), std::string::npos);
}

TEST(CmdRun, DecentralizedWritesPerNodeFiles) {
  const fs::path out = scratch("dpobga");
  std::ostringstream log;
  const ExperimentConfig cfg = parse_config(
      R"({"algorithm": "dpobga", "network": {"topology": "cycle", "nodes": 4}, "horizons": [256]})");
  EXPECT_EQ(cmd_run(cfg, quiet(log, out)), kExitOk);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(line_count(out / ("node_" + std::to_string(i) + ".csv")), 257u);
  }
  const Json summary = Json::parse(slurp(out / "summary.json"));
  for (const auto& node : summary["runs"][0]["nodes"]) {
    EXPECT_EQ(node["counters"]["comms"].get<int>(), 16);
  }
  EXPECT_NE(log.str().find("node3.comms=T/K [16 = 16]"), std::string::npos);
}

TEST(CmdRun, SeedOverrideAndDeterminism) {
  const ExperimentConfig cfg = parse_config(R"({"algorithm": "obga", "horizons": [64], "seeds": [0]})");
  std::ostringstream log;
  LabOptions a = quiet(log, scratch("det_a"));
  a.seeds = std::vector<std::uint64_t>{4, 5};
  LabOptions b = quiet(log, scratch("det_b"));
  b.seeds = a.seeds;
  b.threads = 1;
  EXPECT_EQ(cmd_run(cfg, a), kExitOk);
  EXPECT_EQ(cmd_run(cfg, b), kExitOk);
  EXPECT_EQ(slurp(fs::path(*a.out) / "runs.csv"), slurp(fs::path(*b.out) / "runs.csv"));
  EXPECT_EQ(line_count(fs::path(*a.out) / "runs.csv"), 1u + 2 * 64);
}

TEST(CmdSweep, EmitsSlopeTable) {
  const fs::path out = scratch("sweep");
  std::ostringstream log;
  const ExperimentConfig cfg = parse_config(
      R"({"algorithm": "pobga", "horizons": [64, 256, 1024], "seeds": [0, 1],
          "comparator": {"grid": 65}})");
  EXPECT_EQ(cmd_sweep(cfg, quiet(log, out)), kExitOk);
  EXPECT_EQ(line_count(out / "slope.csv"), 4u);
  const Json summary = Json::parse(slurp(out / "summary.json"));
  EXPECT_EQ(summary["slope"]["used"].get<int>(), 3);
  EXPECT_TRUE(summary["slope"]["value"].is_number());
  EXPECT_EQ(summary["horizons"].size(), 3u);
  EXPECT_NE(log.str().find("log-log slope"), std::string::npos);
}

TEST(CmdSweep, BaselineAndManualModes) {
  std::ostringstream log;
  const ExperimentConfig oga = parse_config(
      R"({"algorithm": "oga", "horizons": [50, 100], "params": {"mode": "manual", "eta": 0.1}})");
  EXPECT_EQ(cmd_sweep(oga, quiet(log, scratch("sweep_oga"))), kExitOk);
  const ExperimentConfig manual = parse_config(
      R"({"algorithm": "pobga", "horizons": [100, 400],
          "params": {"mode": "manual", "eta": 0.05, "eps": 0.005, "K": 10}})");
  EXPECT_EQ(cmd_sweep(manual, quiet(log, scratch("sweep_manual"))), kExitOk);
}

TEST(CmdSweep, NeedsTwoHorizons) {
  std::ostringstream log;
  const ExperimentConfig cfg = parse_config(R"({"horizons": [256]})");
  EXPECT_THROW(cmd_sweep(cfg, quiet(log, scratch("sweep1"))), ConfigError);
}

TEST(CmdVerify, DefaultSuitesPass) {
  ExperimentConfig cfg;
  cfg.verify = small_verify();
  std::ostringstream log;
  EXPECT_EQ(cmd_verify(cfg, quiet(log, scratch("verify"))), kExitOk);
  EXPECT_NE(log.str().find("OK: 14 properties, 0 failed"), std::string::npos) << log.str();
}

TEST(CmdVerify, InjectedFejerBugFails) {
  // Pushes the anchor away from the set after every real projection step.
  const OipOracle broken = [](const DecisionSet& set, const Vector& x0, const Vector& y0,
                              double eps) {
    IPResult r = o_ip(set, x0, y0, eps);
    if (r.lo_steps > 0) r.y_tilde += 0.5 * (r.y_tilde - r.x);
    return r;
  };
  ExperimentConfig cfg;
  cfg.verify = small_verify();
  cfg.verify.suites = {"oip_contract"};
  std::ostringstream log;
  EXPECT_EQ(cmd_verify(cfg, quiet(log, scratch("verify_bug")), broken), kExitViolation);
  bool fejer_failed = false;
  std::istringstream lines(log.str());
  for (std::string line; std::getline(lines, line);) {
    if (line.rfind("FAIL", 0) == 0 && line.find(" fejer ") != std::string::npos) fejer_failed = true;
  }
  EXPECT_TRUE(fejer_failed) << log.str();
}

TEST(CmdVerify, ReportIsReproducible) {
  ExperimentConfig cfg;
  cfg.verify = small_verify();
  std::ostringstream l1, l2;
  const fs::path a = scratch("verify_a"), b = scratch("verify_b");
  cmd_verify(cfg, quiet(l1, a));
  cmd_verify(cfg, quiet(l2, b));
  EXPECT_EQ(slurp(a / "verify_report.txt"), slurp(b / "verify_report.txt"));
  EXPECT_EQ(slurp(a / "verify.json"), slurp(b / "verify.json"));
}

}  // namespace
}  // namespace ocsm
