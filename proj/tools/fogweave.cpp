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

// fogweave command-line driver.
//
// Exit codes: 0 ok, 1 other failure, 2 invalid configuration or usage,
// 3 infeasible, 4 oracle mismatch.

#include <yaml-cpp/yaml.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fogweave.hpp"
#include "fogweave/config.hpp"

namespace fs = std::filesystem;
using namespace fogweave;

namespace {

enum ExitCode : int { kOk = 0, kOther = 1, kUsage = 2, kInfeasible = 3, kOracleMismatch = 4 };

/// Failure that maps to a specific exit code.
struct CommandError : std::runtime_error {
  CommandError(int code, const std::string& what) : std::runtime_error(what), code(code) {}
  int code;
};

TierFilter parse_tier(const std::string& s) {
  if (s == "hybrid") return TierFilter::hybrid;
  if (s == "cloud") return TierFilter::cloud_only;
  if (s == "fog") return TierFilter::fog_only;
  throw CommandError(kUsage, "--tier must be hybrid, cloud or fog, got '" + s + "'");
}

void check_alpha_flag(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw CommandError(kUsage, "--alpha must lie in [0, 1], got " + format_double(alpha));
  }
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CommandError(kOther, "cannot write '" + path.string() + "'");
  return out;
}

void write_file(const fs::path& path, const std::string& content) { open_output(path) << content; }

std::string result_yaml(const SolveResult& res, const ScenarioConfig& cfg, double alpha, TierFilter tier) {
  const auto& infra = cfg.scenario.infra;
  const auto& requests = cfg.scenario.requests;
  const auto num = [](double v) { return format_double(v); };
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "status" << YAML::Value << to_string(res.status);
  out << YAML::Key << "alpha" << YAML::Value << num(alpha);
  out << YAML::Key << "tier" << YAML::Value << to_string(tier);
  out << YAML::Key << "nodes_explored" << YAML::Value << res.nodes_explored;
  if (res.has_placement()) {
    const auto& e = res.evaluation;
    out << YAML::Key << "objective" << YAML::Value << num(res.objective);
    out << YAML::Key << "cost_total" << YAML::Value << num(res.cost_total);
    out << YAML::Key << "makespan_total_ms" << YAML::Value << num(res.makespan_total);
    out << YAML::Key << "cost_deduplicated" << YAML::Value << num(e.cost_total_deduplicated);
    out << YAML::Key << "requests" << YAML::Value << YAML::BeginSeq;
    for (std::size_t r = 0; r < requests.size(); ++r) {
      const auto& c = e.costs[r];
      const auto& m = e.makespans[r];
      out << YAML::BeginMap << YAML::Key << "id" << YAML::Value << requests[r].id;
      out << YAML::Key << "cost" << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key << "processing"
          << YAML::Value << num(c.processing) << YAML::Key << "deployment" << YAML::Value << num(c.deployment)
          << YAML::Key << "communication" << YAML::Value << num(c.communication) << YAML::Key << "total"
          << YAML::Value << num(c.total) << YAML::EndMap;
      out << YAML::Key << "makespan_ms" << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key
          << "processing" << YAML::Value << num(m.processing) << YAML::Key << "communication" << YAML::Value
          << num(m.communication) << YAML::Key << "total" << YAML::Value << num(m.total) << YAML::EndMap;
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::Key << "deployed" << YAML::Value << YAML::BeginSeq;
    for (const auto& d : res.placement.deployed) {
      out << YAML::Flow << YAML::BeginMap << YAML::Key << "type" << YAML::Value
          << infra.catalog()[d.instance.type].id << YAML::Key << "instance" << YAML::Value << d.instance.index
          << YAML::Key << "node" << YAML::Value << infra.nodes()[d.node].id << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

std::string placement_csv(const SolveResult& res, const ScenarioConfig& cfg) {
  const auto& infra = cfg.scenario.infra;
  const auto& requests = cfg.scenario.requests;
  std::ostringstream os;
  CsvRow(os) << "request" << "leaf" << "type" << "instance" << "node" << "tier" << "node_weight";
  if (!res.has_placement()) return os.str();
  for (std::size_t r = 0; r < requests.size(); ++r) {
    const auto leaves = annotate_leaves(requests[r].tree);
    for (std::size_t l = 0; l < leaves.size(); ++l) {
      const auto& a = res.placement.at(r, l);
      if (!a) continue;
      const auto& node = infra.nodes()[a->node];
      CsvRow(os) << requests[r].id << l << leaves[l].type_id << a->instance.index << node.id << to_string(node.tier)
                 << leaves[l].node_weight;
    }
  }
  return os.str();
}

ScenarioConfig load(const std::string& path) {
  try {
    return load_config(path);
  } catch (const ConfigError& e) {
    throw CommandError(kUsage, e.what());
  }
}

struct SolveFlags {
  std::string config;
  std::optional<double> alpha;
  std::string tier = "hybrid";
  bool oracle = false;
  std::string export_lp;
  std::string manifest;
  std::string out;
  unsigned threads = 0;
};

int cmd_solve(const SolveFlags& f) {
  const TierFilter tier = parse_tier(f.tier);
  if (f.alpha) check_alpha_flag(*f.alpha);
  const ScenarioConfig cfg = load(f.config);
  const double alpha = f.alpha.value_or(cfg.alpha);
  const auto& infra = cfg.scenario.infra;
  const auto& requests = cfg.scenario.requests;

  if (!f.export_lp.empty() || !f.manifest.empty()) {
    const PlacementMilp milp(infra, requests, alpha);
    if (!f.export_lp.empty()) write_file(f.export_lp, to_lp(milp.model()));
    if (!f.manifest.empty()) {
      auto out = open_output(f.manifest);
      write_manifest_csv(out, milp.model());
    }
  }

  SolveOptions options;
  options.node_budget = cfg.solver.node_budget;
  options.tier = tier;
  options.threads = f.threads;
  const SolveResult res = solve_exact(infra, requests, alpha, options);

  const std::string yaml = result_yaml(res, cfg, alpha, tier);
  if (f.out.empty()) {
    std::cout << yaml;
  } else {
    const fs::path dir(f.out);
    write_file(dir / "result.yaml", yaml);
    write_file(dir / "placement.csv", placement_csv(res, cfg));
    std::cout << "status: " << to_string(res.status) << "\n";
  }

  if (f.oracle) {
    SolveResult ref;
    try {
      ref = solve_bruteforce(infra, requests, alpha, cfg.solver.oracle_cap, tier);
    } catch (const OracleCapacityError& e) {
      throw CommandError(kUsage, std::string("--oracle: ") + e.what());
    }
    const bool both_infeasible = res.status == SolveStatus::infeasible && ref.status == SolveStatus::infeasible;
    const bool equal = res.status == SolveStatus::optimal && ref.status == SolveStatus::optimal &&
                       std::abs(res.objective - ref.objective) <= 1e-9 * std::max(1.0, std::abs(ref.objective));
    if (!both_infeasible && !equal) {
      throw CommandError(kOracleMismatch, "oracle mismatch: solver " + std::string(to_string(res.status)) + " " +
                                              format_double(res.objective) + ", oracle " + to_string(ref.status) +
                                              " " + format_double(ref.objective));
    }
    std::cout << "oracle: agrees (" << format_double(ref.objective) << ")\n";
  }

  if (res.status == SolveStatus::infeasible) {
    std::cerr << "fogweave: no feasible placement\n";
    return kInfeasible;
  }
  if (res.status == SolveStatus::budget_exhausted) {
    std::cerr << "fogweave: node budget exhausted after " << res.nodes_explored << " nodes\n";
    return kOther;
  }
  return kOk;
}

struct ExperimentFlags {
  std::uint64_t seed = 1;
  double alpha = 0.5;
  std::vector<double> alpha_grid;
  std::size_t trials = 30;
  std::string outdir = "results";
  unsigned threads = 0;
};

int cmd_experiments(const ExperimentFlags& f) {
  check_alpha_flag(f.alpha);
  if (f.trials == 0) throw CommandError(kUsage, "--trials must be at least 1");
  ExperimentOptions opt;
  opt.alpha = f.alpha;
  opt.trials = f.trials;
  opt.solver.threads = f.threads;
  if (!f.alpha_grid.empty()) {
    for (double a : f.alpha_grid) {
      if (!(a >= 0.0 && a <= 1.0)) throw CommandError(kUsage, "--alpha-grid values must lie in [0, 1]");
    }
    opt.alpha_grid = f.alpha_grid;
  }
  const fs::path dir(f.outdir);
  const fs::path marker = dir / "INCOMPLETE";
  write_file(marker, "run in progress or aborted\n");
  ExperimentReport rep;
  try {
    rep = run_reference_experiments(f.seed, opt);
  } catch (const std::exception& e) {
    write_file(marker, std::string("aborted: ") + e.what() + "\n");
    throw;
  }
  auto write = [&](const char* name, auto writer, const auto& rows) {
    auto out = open_output(dir / name);
    writer(out, rows);
  };
  write("tier_comparison.csv", write_tier_csv, rep.tiers);
  write("sharing.csv", write_sharing_csv, rep.sharing);
  write("alpha_sweep.csv", write_alpha_csv, rep.alpha);
  write("random_baseline.csv", write_random_csv, rep.random);
  write("assertions.csv", write_assertions_csv, rep.assertions);
  fs::remove(marker);

  std::size_t failed = 0;
  for (const auto& a : rep.assertions) {
    if (!a.passed) {
      ++failed;
      std::cout << "FAIL " << a.section << ": " << a.name << " (" << a.detail << ")\n";
    }
  }
  std::cout << rep.assertions.size() - failed << "/" << rep.assertions.size() << " assertions passed\n";
  return failed == 0 ? kOk : kOther;
}

struct McFlags {
  std::string config;
  std::optional<double> alpha;
  std::size_t samples = 100'000;
  std::uint64_t seed = 1;
  std::string out;
  unsigned threads = 0;
};

int cmd_mc(const McFlags& f) {
  if (f.alpha) check_alpha_flag(*f.alpha);
  if (f.samples == 0) throw CommandError(kUsage, "--samples must be at least 1");
  const ScenarioConfig cfg = load(f.config);
  const double alpha = f.alpha.value_or(cfg.alpha);
  const auto& requests = cfg.scenario.requests;
  SolveOptions options;
  options.node_budget = cfg.solver.node_budget;
  options.threads = f.threads;
  const SolveResult res = solve_exact(cfg.scenario.infra, requests, alpha, options);
  if (res.status == SolveStatus::infeasible) {
    std::cerr << "fogweave: no feasible placement\n";
    return kInfeasible;
  }
  if (!res.has_placement()) {
    std::cerr << "fogweave: node budget exhausted before any placement was found\n";
    return kOther;
  }

  std::ostringstream os;
  CsvRow(os) << "request" << "samples" << "seed" << "quantity" << "analytic" << "mean" << "stderr_mean"
             << "deviation" << "check" << "note";
  bool ok = true;
  for (std::size_t r = 0; r < requests.size(); ++r) {
    const auto rep = compare_to_analytic(res.placement, r, requests[r], cfg.scenario.infra, f.samples,
                                         derive_seed(f.seed, r), f.threads);
    ok = ok && rep.passed();
    std::string note;
    if (!rep.assertions_applied()) note = "insufficient samples for assertions";
    const auto row = [&](const Estimate& e, Check check, const std::string& extra) {
      CsvRow(os) << rep.request << rep.samples << rep.seed << e.name << e.analytic << e.mean << e.stderr_mean
                 << e.deviation() << to_string(check) << (note.empty() ? extra : note);
    };
    row(rep.cost, rep.cost_check, "");
    row(rep.makespan, rep.makespan_check,
        rep.makespan_exact ? "" : "stochastic parallel branches: analytic is a lower bound");
    for (const auto& v : rep.visits) row(v, rep.visits_check, "");
    if (rep.truncated_loops > 0) {
      std::cerr << "fogweave: " << rep.truncated_loops << " loop executions truncated\n";
    }
    if (!rep.assertions_applied()) {
      std::cerr << "fogweave: " << rep.request << ": insufficient samples for assertions (need "
                << kMinSamplesForAssertions << ")\n";
    }
  }
  if (f.out.empty()) {
    std::cout << os.str();
  } else {
    write_file(f.out, os.str());
  }
  return ok ? kOk : kOther;
}

int cmd_generate(std::uint64_t seed, double alpha, const std::string& out) {
  check_alpha_flag(alpha);
  ScenarioConfig cfg;
  cfg.scenario = generate_scenario(seed);
  cfg.alpha = alpha;
  const std::string text = dump_config(cfg);
  if (out.empty()) {
    std::cout << text;
  } else {
    write_file(out, text);
  }
  return kOk;
}

int cmd_validate(const std::string& path) {
  const ScenarioConfig cfg = load(path);
  std::size_t leaves = 0;
  for (const auto& r : cfg.scenario.requests) leaves += r.tree.leaf_count();
  std::cout << path << ": ok (" << cfg.scenario.infra.nodes().size() << " nodes, "
            << cfg.scenario.infra.links().size() << " links, " << cfg.scenario.infra.catalog().size()
            << " VNF types, " << cfg.scenario.requests.size() << " requests, " << leaves << " VNFs)\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fogweave: exact VNF placement on hybrid cloud/fog infrastructure"};
  app.require_subcommand(1);

  SolveFlags solve;
  auto* s = app.add_subcommand("solve", "Solve a configuration to optimality");
  s->add_option("config", solve.config, "Scenario YAML")->required();
  s->add_option("--alpha", solve.alpha, "Cost weight in [0, 1] (overrides the config)");
  s->add_option("--tier", solve.tier, "hybrid, cloud or fog");
  s->add_flag("--oracle", solve.oracle, "Cross-check against exhaustive enumeration");
  s->add_option("--export-lp", solve.export_lp, "Write the MILP in LP format");
  s->add_option("--export-manifest", solve.manifest, "Write the MILP variable manifest as CSV");
  s->add_option("--out", solve.out, "Directory for result.yaml and placement.csv (default: stdout)");
  s->add_option("--threads", solve.threads, "Worker threads (0 = hardware concurrency)");

  ExperimentFlags exp;
  auto* e = app.add_subcommand("experiments", "Run the tier, sharing, alpha and random-baseline experiments");
  e->add_option("--seed", exp.seed, "Scenario seed");
  e->add_option("--alpha", exp.alpha, "Cost weight for tier, sharing and random sections");
  e->add_option("--alpha-grid", exp.alpha_grid, "Comma-separated alpha values for the sweep")->delimiter(',');
  e->add_option("--trials", exp.trials, "Random placements per application");
  e->add_option("--outdir", exp.outdir, "Output directory");
  e->add_option("--threads", exp.threads, "Worker threads (0 = hardware concurrency)");

  McFlags mc;
  auto* m = app.add_subcommand("mc", "Monte Carlo check of the optimum's expected cost and makespan");
  m->add_option("config", mc.config, "Scenario YAML")->required();
  m->add_option("--alpha", mc.alpha, "Cost weight in [0, 1] (overrides the config)");
  m->add_option("--samples", mc.samples, "Sampled executions per request");
  m->add_option("--seed", mc.seed, "Sampling seed");
  m->add_option("--out", mc.out, "Report CSV path (default: stdout)");
  m->add_option("--threads", mc.threads, "Worker threads (0 = hardware concurrency)");

  std::uint64_t gen_seed = 1;
  double gen_alpha = 0.5;
  std::string gen_out;
  auto* g = app.add_subcommand("generate", "Write a seeded reference scenario as YAML");
  g->add_option("--seed", gen_seed, "Scenario seed");
  g->add_option("--alpha", gen_alpha, "Cost weight stored in the config");
  g->add_option("--out", gen_out, "Output path (default: stdout)");

  std::string validate_path;
  auto* v = app.add_subcommand("validate", "Check a configuration without solving");
  v->add_option("config", validate_path, "Scenario YAML")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*s) return cmd_solve(solve);
    if (*e) return cmd_experiments(exp);
    if (*m) return cmd_mc(mc);
    if (*g) return cmd_generate(gen_seed, gen_alpha, gen_out);
    if (*v) return cmd_validate(validate_path);
  } catch (const CommandError& err) {
    std::cerr << "fogweave: " << err.what() << "\n";
    return err.code;
  } catch (const std::exception& err) {
    std::cerr << "fogweave: " << err.what() << "\n";
    return kOther;
  }
  return kOther;
}
