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

#pragma once

/// \file experiments.hpp
///
/// The evaluation protocol on the reference scenario: tier comparison,
/// sharing gain, alpha sweep and random baseline. Every section yields
/// plain rows (written as CSV) plus ordering assertions.
///
/// CSV columns
///   tier_comparison.csv  seed,alpha,app,tier,status,cost,makespan,objective,
///                        cost_deduplicated,vcpu_cloud,vcpu_fog,nodes_explored
///   sharing.csv          seed,alpha,variant,status,cost_total,cost_deduplicated,
///                        license_deduplicated,makespan_total,objective,
///                        shared_load_bits,shared_capacity_bits
///   alpha_sweep.csv      seed,alpha,status,vcpu_cloud,vcpu_fog,cloud_share,
///                        fog_share,cost_total,makespan_total,objective
///   random_baseline.csv  seed,alpha,app,trial,trial_seed,status,cost,makespan,
///                        objective,optimal_objective,gap
///   assertions.csv       section,name,result,detail

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "fogweave/csv.hpp"
#include "fogweave/evaluation.hpp"
#include "fogweave/scenario.hpp"
#include "fogweave/solver.hpp"

namespace fogweave {

struct Assertion {
  std::string section;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct TierRow {
  std::uint64_t seed = 0;
  double alpha = 0.0;
  std::string app;
  TierFilter tier = TierFilter::hybrid;
  SolveStatus status = SolveStatus::infeasible;
  double cost = 0.0;
  double makespan = 0.0;
  double objective = 0.0;
  double cost_deduplicated = 0.0;
  double vcpu_cloud = 0.0;
  double vcpu_fog = 0.0;
  std::uint64_t nodes_explored = 0;
};

struct SharingRow {
  std::uint64_t seed = 0;
  double alpha = 0.0;
  std::string variant;  // "sharing" or "non_sharing"
  SolveStatus status = SolveStatus::infeasible;
  double cost_total = 0.0;
  double cost_deduplicated = 0.0;
  double license_deduplicated = 0.0;
  double makespan_total = 0.0;
  double objective = 0.0;
  double shared_load_bits = 0.0;      // traffic on the shared type's busiest instance
  double shared_capacity_bits = 0.0;  // usable capacity of one instance
};

struct AlphaRow {
  std::uint64_t seed = 0;
  double alpha = 0.0;
  SolveStatus status = SolveStatus::infeasible;
  double vcpu_cloud = 0.0;
  double vcpu_fog = 0.0;
  double cloud_share = 0.0;
  double fog_share = 0.0;
  double cost_total = 0.0;
  double makespan_total = 0.0;
  double objective = 0.0;
};

struct RandomRow {
  std::uint64_t seed = 0;
  double alpha = 0.0;
  std::string app;
  std::size_t trial = 0;
  std::uint64_t trial_seed = 0;
  SolveStatus status = SolveStatus::infeasible;
  double cost = 0.0;
  double makespan = 0.0;
  double objective = 0.0;
  double optimal_objective = 0.0;
};

struct ExperimentOptions {
  double alpha = 0.5;
  std::vector<double> alpha_grid{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::size_t trials = 30;
  std::uint64_t random_max_tries = 1'000'000;
  SolveOptions solver;
  ScenarioParams scenario;
};

/// vCPU held by deployed instances, per tier: {cloud, fog}.
inline std::pair<double, double> vcpu_by_tier(const Placement& p, const Infrastructure& infra) {
  double cloud = 0.0;
  double fog = 0.0;
  for (const auto& d : p.deployed) {
    const double u = infra.catalog()[d.instance.type].requirement_vcpu;
    (infra.nodes()[d.node].tier == Tier::cloud ? cloud : fog) += u;
  }
  return {cloud, fog};
}

namespace detail {

inline void rename_type(TreeNode& node, const std::string& from, const std::string& to) {
  if (node.kind == NodeKind::leaf && node.type_id == from) node.type_id = to;
  for (auto& c : node.children) rename_type(c, from, to);
}

inline std::string fmt(double v) { return format_double(v); }

}  // namespace detail

/// Gives request `request` a private copy of VNF type `type_id` (same
/// parameters, id suffixed with the request id), so it can no longer share
/// instances of that type with other requests.
inline Scenario unshare(const Scenario& s, const std::string& type_id, std::size_t request) {
  const auto t = s.infra.type_index(type_id);
  if (!t) throw std::invalid_argument("unknown VNF type '" + type_id + "'");
  Scenario out{s.infra, s.requests};
  auto& req = out.requests.at(request);
  const std::string clone_id = type_id + "_" + req.id;
  auto catalog = s.infra.catalog();
  VnfType clone = catalog[*t];
  clone.id = clone_id;
  catalog.push_back(std::move(clone));
  out.infra = s.infra.with_catalog(std::move(catalog));
  detail::rename_type(req.tree.root, type_id, clone_id);
  return out;
}

inline std::vector<TierRow> run_tier_comparison(std::uint64_t seed, const Scenario& s, double alpha,
                                                const SolveOptions& options = {}) {
  std::vector<TierRow> rows;
  for (const auto& req : s.requests) {
    const std::vector<Request> one{req};
    for (auto tier : {TierFilter::cloud_only, TierFilter::fog_only, TierFilter::hybrid}) {
      const auto res = solve_restricted(s.infra, one, alpha, tier, options);
      TierRow row;
      row.seed = seed;
      row.alpha = alpha;
      row.app = req.id;
      row.tier = tier;
      row.status = res.status;
      row.nodes_explored = res.nodes_explored;
      if (res.has_placement()) {
        row.cost = res.cost_total;
        row.makespan = res.makespan_total;
        row.objective = res.objective;
        row.cost_deduplicated = res.evaluation.cost_total_deduplicated;
        std::tie(row.vcpu_cloud, row.vcpu_fog) = vcpu_by_tier(res.placement, s.infra);
      }
      rows.push_back(row);
    }
  }
  return rows;
}

inline std::vector<Assertion> check_tier_comparison(const std::vector<TierRow>& rows) {
  std::vector<Assertion> out;
  constexpr double kTol = 1e-9;
  for (std::size_t k = 0; k + 2 < rows.size(); k += 3) {
    const TierRow& cloud = rows[k];
    const TierRow& fog = rows[k + 1];
    const TierRow& hybrid = rows[k + 2];
    const std::string tag = "seed " + std::to_string(cloud.seed) + " " + cloud.app;
    const bool solved = cloud.status == SolveStatus::optimal && fog.status == SolveStatus::optimal &&
                        hybrid.status == SolveStatus::optimal;
    out.push_back({"tier", "all tiers solved to optimality", solved,
                   tag + ": cloud " + to_string(cloud.status) + ", fog " + to_string(fog.status) + ", hybrid " +
                       to_string(hybrid.status)});
    if (!solved) continue;
    out.push_back({"tier", "cost(cloud) <= cost(fog)", cloud.cost <= fog.cost + kTol,
                   tag + ": " + detail::fmt(cloud.cost) + " vs " + detail::fmt(fog.cost)});
    out.push_back({"tier", "makespan(fog) <= makespan(cloud)", fog.makespan <= cloud.makespan + kTol,
                   tag + ": " + detail::fmt(fog.makespan) + " vs " + detail::fmt(cloud.makespan)});
    const double best = std::min(cloud.objective, fog.objective);
    out.push_back({"tier", "objective(hybrid) <= min(cloud, fog)", hybrid.objective <= best + kTol,
                   tag + ": " + detail::fmt(hybrid.objective) + " vs " + detail::fmt(best)});
  }
  return out;
}

inline std::vector<SharingRow> run_sharing_comparison(std::uint64_t seed, const Scenario& s, double alpha,
                                                      const SolveOptions& options = {}) {
  const std::vector<Request> pair{s.requests.at(0), s.requests.at(1)};
  const Scenario shared{s.infra, pair};
  const Scenario separate = unshare(shared, kSharedStorageType, 1);
  std::vector<SharingRow> rows;
  for (const auto* sc : {&shared, &separate}) {
    const auto res = solve_exact(sc->infra, sc->requests, alpha, options);
    SharingRow row;
    row.seed = seed;
    row.alpha = alpha;
    row.variant = sc == &shared ? "sharing" : "non_sharing";
    row.status = res.status;
    const auto t = *sc->infra.type_index(kSharedStorageType);
    row.shared_capacity_bits = sc->infra.vnf_usage_threshold() * sc->infra.catalog()[t].capacity_bits;
    if (res.has_placement()) {
      row.cost_total = res.cost_total;
      row.cost_deduplicated = res.evaluation.cost_total_deduplicated;
      row.license_deduplicated = res.evaluation.license_deduplicated;
      row.makespan_total = res.makespan_total;
      row.objective = res.objective;
      std::vector<double> load(static_cast<std::size_t>(sc->infra.catalog()[t].instance_count), 0.0);
      for (std::size_t r = 0; r < sc->requests.size(); ++r) {
        for (const auto& a : res.placement.assignments[r]) {
          if (a && a->instance.type == t) load[static_cast<std::size_t>(a->instance.index)] += sc->requests[r].traffic_bits;
        }
      }
      row.shared_load_bits = *std::max_element(load.begin(), load.end());
    }
    rows.push_back(row);
  }
  return rows;
}

inline std::vector<Assertion> check_sharing(const std::vector<SharingRow>& rows) {
  std::vector<Assertion> out;
  for (std::size_t k = 0; k + 1 < rows.size(); k += 2) {
    const SharingRow& sh = rows[k];
    const SharingRow& ns = rows[k + 1];
    const std::string tag = "seed " + std::to_string(sh.seed);
    const bool solved = sh.status == SolveStatus::optimal && ns.status == SolveStatus::optimal;
    out.push_back({"sharing", "both variants feasible", solved,
                   tag + ": sharing " + to_string(sh.status) + ", non_sharing " + to_string(ns.status)});
    if (!solved) continue;
    const double gap = ns.cost_deduplicated - sh.cost_deduplicated;
    out.push_back({"sharing", "sharing total <= non-sharing total", gap >= -1e-9,
                   tag + ": gap " + detail::fmt(gap)});
    if (sh.shared_load_bits <= sh.shared_capacity_bits) {
      out.push_back({"sharing", "non-sharing - sharing >= one license", gap >= 100.0 - 1e-9,
                     tag + ": gap " + detail::fmt(gap)});
    }
  }
  return out;
}

inline std::vector<AlphaRow> run_alpha_sweep(std::uint64_t seed, const Scenario& s,
                                             const std::vector<double>& grid, const SolveOptions& options = {}) {
  std::vector<AlphaRow> rows;
  for (double alpha : grid) {
    const auto res = solve_exact(s.infra, s.requests, alpha, options);
    AlphaRow row;
    row.seed = seed;
    row.alpha = alpha;
    row.status = res.status;
    if (res.has_placement()) {
      std::tie(row.vcpu_cloud, row.vcpu_fog) = vcpu_by_tier(res.placement, s.infra);
      const double total = row.vcpu_cloud + row.vcpu_fog;
      row.cloud_share = total > 0.0 ? row.vcpu_cloud / total : 0.0;
      row.fog_share = total > 0.0 ? row.vcpu_fog / total : 0.0;
      row.cost_total = res.cost_total;
      row.makespan_total = res.makespan_total;
      row.objective = res.objective;
    }
    rows.push_back(row);
  }
  return rows;
}

/// `fog_only_feasible` tells whether all requests fit the fog tier alone.
inline std::vector<Assertion> check_alpha_sweep(const std::vector<AlphaRow>& rows, bool fog_only_feasible) {
  std::vector<Assertion> out;
  if (rows.empty()) return out;
  const std::string tag = "seed " + std::to_string(rows.front().seed);
  bool solved = true;
  for (const auto& r : rows) solved = solved && r.status == SolveStatus::optimal;
  out.push_back({"alpha", "every alpha solved to optimality", solved, tag});
  if (!solved) return out;
  for (const auto& r : rows) {
    if (r.vcpu_cloud + r.vcpu_fog > 0.0 && std::abs(r.cloud_share + r.fog_share - 1.0) > 1e-9) {
      out.push_back({"alpha", "shares sum to 1", false, tag + " alpha " + detail::fmt(r.alpha)});
    }
    if (r.alpha == 1.0) {
      out.push_back({"alpha", "alpha=1 uses only cloud vCPU", r.cloud_share == 1.0,
                     tag + ": cloud share " + detail::fmt(r.cloud_share)});
    }
    if (r.alpha == 0.0) {
      double fog_max = 0.0;
      for (const auto& o : rows) fog_max = std::max(fog_max, o.vcpu_fog);
      out.push_back({"alpha", "alpha=0 fills fog before cloud",
                     (r.vcpu_cloud == 0.0 || !fog_only_feasible) && r.vcpu_fog >= fog_max,
                     tag + ": fog " + detail::fmt(r.vcpu_fog) + " (max over grid " + detail::fmt(fog_max) +
                         "), cloud " + detail::fmt(r.vcpu_cloud) +
                         (fog_only_feasible ? ", fog tier alone is feasible" : ", fog tier alone is infeasible")});
    }
  }
  std::vector<AlphaRow> sorted = rows;
  std::stable_sort(sorted.begin(), sorted.end(), [](const AlphaRow& a, const AlphaRow& b) { return a.alpha < b.alpha; });
  bool cost_ok = true;
  bool makespan_ok = true;
  bool share_ok = true;
  for (std::size_t k = 1; k < sorted.size(); ++k) {
    const double tol = 1e-9;
    cost_ok = cost_ok && sorted[k].cost_total <= sorted[k - 1].cost_total + tol * std::max(1.0, sorted[k - 1].cost_total);
    makespan_ok = makespan_ok &&
                  sorted[k].makespan_total >= sorted[k - 1].makespan_total - tol * std::max(1.0, sorted[k - 1].makespan_total);
    share_ok = share_ok && sorted[k].cloud_share >= sorted[k - 1].cloud_share - 1e-12;
  }
  out.push_back({"alpha", "cost non-increasing in alpha", cost_ok, tag});
  out.push_back({"alpha", "makespan non-decreasing in alpha", makespan_ok, tag});
  out.push_back({"alpha", "cloud share non-decreasing in alpha", share_ok, tag});
  return out;
}

inline std::vector<RandomRow> run_random_comparison(std::uint64_t seed, const Scenario& s, double alpha,
                                                    std::size_t trials, std::uint64_t max_tries = 1'000'000,
                                                    const SolveOptions& options = {}) {
  if (trials == 0) throw std::invalid_argument("trials must be at least 1");
  std::vector<RandomRow> rows;
  for (std::size_t r = 0; r < s.requests.size(); ++r) {
    const std::vector<Request> one{s.requests[r]};
    const auto best = solve_exact(s.infra, one, alpha, options);
    for (std::size_t k = 0; k < trials; ++k) {
      RandomRow row;
      row.seed = seed;
      row.alpha = alpha;
      row.app = s.requests[r].id;
      row.trial = k;
      row.trial_seed = derive_seed(derive_seed(seed, 100 + r), k);
      const auto res = random_feasible(s.infra, one, alpha, row.trial_seed, max_tries);
      row.status = res.status;
      row.optimal_objective = best.has_placement() ? best.objective : std::numeric_limits<double>::infinity();
      if (res.has_placement()) {
        row.cost = res.cost_total;
        row.makespan = res.makespan_total;
        row.objective = res.objective;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

inline std::vector<Assertion> check_random(const std::vector<RandomRow>& rows) {
  std::vector<Assertion> out;
  std::vector<std::string> apps;
  for (const auto& r : rows) {
    if (std::find(apps.begin(), apps.end(), r.app) == apps.end()) apps.push_back(r.app);
  }
  for (const auto& app : apps) {
    bool feasible = true;
    bool dominated = true;
    double gap = 0.0;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    for (const auto& r : rows) {
      if (r.app != app) continue;
      seed = r.seed;
      feasible = feasible && r.status == SolveStatus::feasible;
      if (r.status != SolveStatus::feasible) continue;
      dominated = dominated && r.objective >= r.optimal_objective - 1e-9 * std::max(1.0, r.optimal_objective);
      gap += r.objective - r.optimal_objective;
      ++n;
    }
    const std::string tag = "seed " + std::to_string(seed) + " " + app;
    out.push_back({"random", "every trial feasible", feasible, tag});
    out.push_back({"random", "random objective >= optimal", dominated, tag});
    const double mean_gap = n > 0 ? gap / static_cast<double>(n) : 0.0;
    out.push_back({"random", "mean gap > 0", mean_gap > 0.0, tag + ": mean gap " + detail::fmt(mean_gap)});
  }
  return out;
}

struct ExperimentReport {
  std::vector<TierRow> tiers;
  std::vector<SharingRow> sharing;
  std::vector<AlphaRow> alpha;
  std::vector<RandomRow> random;
  std::vector<Assertion> assertions;

  bool passed() const {
    return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.passed; });
  }
};

/// All four sections for one scenario seed.
inline ExperimentReport run_reference_experiments(std::uint64_t seed, const ExperimentOptions& opt = {}) {
  const Scenario s = generate_scenario(seed, opt.scenario);
  ExperimentReport rep;
  rep.tiers = run_tier_comparison(seed, s, opt.alpha, opt.solver);
  rep.sharing = run_sharing_comparison(seed, s, opt.alpha, opt.solver);
  // The sweep runs on the sharing pair: it fits the cloud tier (so alpha=1
  // can go all-cloud) but never the fog tier alone.
  const Scenario pair{s.infra, {s.requests.at(0), s.requests.at(1)}};
  rep.alpha = run_alpha_sweep(seed, pair, opt.alpha_grid, opt.solver);
  rep.random = run_random_comparison(seed, s, opt.alpha, opt.trials, opt.random_max_tries, opt.solver);

  const auto fog_only = solve_restricted(pair.infra, pair.requests, 0.0, TierFilter::fog_only, opt.solver);
  for (auto part : {check_tier_comparison(rep.tiers), check_sharing(rep.sharing),
                    check_alpha_sweep(rep.alpha, fog_only.status == SolveStatus::optimal), check_random(rep.random)}) {
    rep.assertions.insert(rep.assertions.end(), part.begin(), part.end());
  }
  return rep;
}

inline void write_tier_csv(std::ostream& os, const std::vector<TierRow>& rows) {
  CsvRow(os) << "seed" << "alpha" << "app" << "tier" << "status" << "cost" << "makespan" << "objective"
             << "cost_deduplicated" << "vcpu_cloud" << "vcpu_fog" << "nodes_explored";
  for (const auto& r : rows) {
    CsvRow(os) << r.seed << r.alpha << r.app << to_string(r.tier) << to_string(r.status) << r.cost << r.makespan
               << r.objective << r.cost_deduplicated << r.vcpu_cloud << r.vcpu_fog << r.nodes_explored;
  }
}

inline void write_sharing_csv(std::ostream& os, const std::vector<SharingRow>& rows) {
  CsvRow(os) << "seed" << "alpha" << "variant" << "status" << "cost_total" << "cost_deduplicated"
             << "license_deduplicated" << "makespan_total" << "objective" << "shared_load_bits"
             << "shared_capacity_bits";
  for (const auto& r : rows) {
    CsvRow(os) << r.seed << r.alpha << r.variant << to_string(r.status) << r.cost_total << r.cost_deduplicated
               << r.license_deduplicated << r.makespan_total << r.objective << r.shared_load_bits
               << r.shared_capacity_bits;
  }
}

inline void write_alpha_csv(std::ostream& os, const std::vector<AlphaRow>& rows) {
  CsvRow(os) << "seed" << "alpha" << "status" << "vcpu_cloud" << "vcpu_fog" << "cloud_share" << "fog_share"
             << "cost_total" << "makespan_total" << "objective";
  for (const auto& r : rows) {
    CsvRow(os) << r.seed << r.alpha << to_string(r.status) << r.vcpu_cloud << r.vcpu_fog << r.cloud_share
               << r.fog_share << r.cost_total << r.makespan_total << r.objective;
  }
}

inline void write_random_csv(std::ostream& os, const std::vector<RandomRow>& rows) {
  CsvRow(os) << "seed" << "alpha" << "app" << "trial" << "trial_seed" << "status" << "cost" << "makespan"
             << "objective" << "optimal_objective" << "gap";
  for (const auto& r : rows) {
    CsvRow(os) << r.seed << r.alpha << r.app << r.trial << r.trial_seed << to_string(r.status) << r.cost
               << r.makespan << r.objective << r.optimal_objective << r.objective - r.optimal_objective;
  }
}

inline void write_assertions_csv(std::ostream& os, const std::vector<Assertion>& rows) {
  CsvRow(os) << "section" << "name" << "result" << "detail";
  for (const auto& a : rows) CsvRow(os) << a.section << a.name << (a.passed ? "PASS" : "FAIL") << a.detail;
}

}  // namespace fogweave
