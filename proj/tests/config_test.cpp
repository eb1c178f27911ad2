// Copyright 2026 The fogweave Authors
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

#include <gtest/gtest.h>

#include <fstream>
#include <regex>
#include <sstream>
#include <string>

#include "fogweave.hpp"
#include "fogweave/config.hpp"

namespace fogweave {
namespace {

const std::string kConfigDir = FOGWEAVE_CONFIG_DIR;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string tiny_text() { return slurp(kConfigDir + "/tiny.yaml"); }

std::string replaced(std::string text, const std::string& from, const std::string& to) {
  const auto at = text.find(from);
  EXPECT_NE(at, std::string::npos) << from;
  if (at != std::string::npos) text.replace(at, from.size(), to);
  return text;
}

// Message of the ConfigError thrown by parsing `text`, or "" if it parses.
std::string error_of(const std::string& text) {
  try {
    (void)parse_config(text, "t.yaml");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(Config, ParsesTinyWithUnitConversions) {
  const auto cfg = load_config(kConfigDir + "/tiny.yaml");
  const auto& infra = cfg.scenario.infra;
  EXPECT_EQ(cfg.alpha, 0.5);
  EXPECT_EQ(cfg.solver.node_budget, 1'000'000U);
  EXPECT_EQ(infra.nodes().size(), 3U);
  EXPECT_EQ(infra.devices().size(), 2U);
  EXPECT_EQ(infra.delay_unit_bits(), 80 * 8000.0);
  const Link* l = infra.device_link(0, 1);
  ASSERT_NE(l, nullptr);
  EXPECT_DOUBLE_EQ(l->bandwidth_bits, 54e6);
  EXPECT_DOUBLE_EQ(l->cost_per_bit, 1.0 / 1e9);
  EXPECT_EQ(l->id, "cam1_fog1");
  ASSERT_EQ(cfg.scenario.requests.size(), 2U);
  EXPECT_EQ(cfg.scenario.requests[0].traffic_bits, 640'000.0);
  EXPECT_EQ(cfg.scenario.requests[0].tree.leaf_count(), 3U);
}

TEST(Config, DumpRoundTrips) {
  for (const auto* name : {"tiny.yaml", "driving.yaml", "reference.yaml", "over_capacity.yaml"}) {
    const auto cfg = load_config(kConfigDir + "/" + name);
    const auto text = dump_config(cfg);
    const auto again = parse_config(text);
    EXPECT_EQ(dump_config(again), text) << name;
    EXPECT_EQ(again.alpha, cfg.alpha);
    EXPECT_EQ(again.solver, cfg.solver);
  }
}

TEST(Config, GeneratedScenarioSurvivesDump) {
  const auto s = generate_scenario(5);
  ScenarioConfig cfg{s, 0.5, {}};
  const auto back = parse_config(dump_config(cfg));
  // Same numbers in, same optimum out.
  const std::vector<Request> one{s.requests[2]};
  const std::vector<Request> one_back{back.scenario.requests[2]};
  const auto a = solve_exact(s.infra, one, 0.5);
  const auto b = solve_exact(back.scenario.infra, one_back, 0.5);
  EXPECT_EQ(a.objective, b.objective);
  EXPECT_EQ(a.placement, b.placement);
}

TEST(Config, UnknownKeyReportsLineAndColumn) {
  const auto msg = error_of(replaced(tiny_text(), "capacity_vcpu: 8,", "capacity_vcpus: 8,"));
  EXPECT_NE(msg.find("unknown field 'capacity_vcpus'"), std::string::npos) << msg;
  EXPECT_TRUE(std::regex_search(msg, std::regex("^t\\.yaml:7:[0-9]+: "))) << msg;
}

TEST(Config, RejectsBadValues) {
  const auto base = tiny_text();
  const std::pair<std::string, std::string> edits[] = {
      {"alpha: 0.5", "alpha: 1.5"},
      {"alpha: 0.5", "alpha: half"},
      {"tier: cloud,", "tier: edge,"},
      {"capacity_vcpu: 8,", "capacity_vcpu: -8,"},
      {"p: [0.7, 0.3]", "p: [0.7, 0.2]"},
      {"[capture, archive]", "[capture, nonexistent]"},
      {"devices: [cam2]", "devices: [cam9]"},
      {"requirement_vcpu: 2, instances: 1", "requirement_vcpu: 2, instances: 0"},
      {"tree: {seq: [capture, archive]}", "tree: {loop: {q: 1, body: [capture, archive]}}"},
      {"tree: {seq: [capture, archive]}", "tree: {fork: [capture, archive]}"},
      {"tree: {seq: [capture, archive]}", "tree: {seq: [capture, capture]}"},
      {"nodes:", "nodes: 3\nunused:"},
  };
  for (const auto& [from, to] : edits) {
    const auto msg = error_of(replaced(base, from, to));
    EXPECT_FALSE(msg.empty()) << to;
    EXPECT_EQ(msg.rfind("t.yaml:", 0), 0U) << msg;
  }
}

TEST(Config, MalformedYamlAndMissingFile) {
  EXPECT_TRUE(std::regex_search(error_of("nodes: [\n  {id: x"), std::regex("^t\\.yaml:[0-9]+:[0-9]+: ")));
  EXPECT_THROW(load_config(kConfigDir + "/no_such_file.yaml"), ConfigError);
}

TEST(Config, BundledConfigsValidate) {
  for (const auto* name : {"tiny.yaml", "driving.yaml", "reference.yaml", "over_capacity.yaml"}) {
    const auto cfg = load_config(kConfigDir + "/" + name);
    EXPECT_TRUE(validate_scenario(cfg.scenario.infra, cfg.scenario.requests).ok()) << name;
  }
}

TEST(Config, TinyIsOracleSized) {
  const auto cfg = load_config(kConfigDir + "/tiny.yaml");
  const auto& s = cfg.scenario;
  EXPECT_LE(oracle_space(s.infra, s.requests, TierFilter::hybrid), cfg.solver.oracle_cap);
  const auto exact = solve_exact(s.infra, s.requests, cfg.alpha);
  const auto brute = solve_bruteforce(s.infra, s.requests, cfg.alpha, cfg.solver.oracle_cap);
  ASSERT_EQ(exact.status, SolveStatus::optimal);
  EXPECT_NEAR(exact.objective, brute.objective, 1e-9 * brute.objective);
}

}  // namespace
}  // namespace fogweave
