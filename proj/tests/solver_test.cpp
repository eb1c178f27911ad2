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

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "fogweave/evaluation.hpp"
#include "fogweave/scenario.hpp"
#include "fogweave/solver.hpp"
#include "reference_fold.hpp"
#include "test_support.hpp"

namespace fogweave {
namespace {

using testing::make_request;
using testing::make_type;

double tol(double v) { return 1e-9 * std::max(1.0, std::abs(v)); }

TEST(SolveExact, SingleVnfFollowsAlpha) {
  const auto infra = testing::two_node_infra({make_type("A", 2.0)});
  const std::vector<Request> reqs{make_request("r", vnf("A"))};
  const auto cost_first = solve_exact(infra, reqs, 1.0);
  ASSERT_EQ(cost_first.status, SolveStatus::optimal);
  EXPECT_EQ(infra.nodes()[cost_first.placement.at(0, 0)->node].tier, Tier::cloud);
  const auto delay_first = solve_exact(infra, reqs, 0.0);
  ASSERT_EQ(delay_first.status, SolveStatus::optimal);
  EXPECT_EQ(infra.nodes()[delay_first.placement.at(0, 0)->node].tier, Tier::fog);
}

TEST(SolveExact, DemandAboveCapacityIsInfeasible) {
  const auto infra = testing::two_node_infra({make_type("A", 8.0), make_type("B", 3.0), make_type("C", 1.0)});
  const std::vector<Request> reqs{make_request("r", seq({vnf("A"), vnf("B"), vnf("C")}))};
  const auto res = solve_exact(infra, reqs, 0.5);
  EXPECT_EQ(res.status, SolveStatus::infeasible);
  EXPECT_FALSE(res.has_placement());
  EXPECT_EQ(solve_bruteforce(infra, reqs, 0.5, 1000).status, SolveStatus::infeasible);
}

TEST(SolveExact, RejectsAlphaOutOfRange) {
  const auto infra = testing::two_node_infra({make_type("A", 2.0)});
  EXPECT_THROW(solve_exact(infra, {make_request("r", vnf("A"))}, 1.5), std::invalid_argument);
}

TEST(SolveExact, OptimalResultIsFeasibleAndConsistent) {
  for (std::uint64_t seed = 1; seed <= 2; ++seed) {
    const auto s = generate_scenario(seed);
    const auto res = solve_exact(s.infra, s.requests, 0.5);
    ASSERT_EQ(res.status, SolveStatus::optimal);
    EXPECT_TRUE(check_feasibility(res.placement, s.requests, s.infra).empty());
    const double ref = testing::reference_objective(s.infra, s.requests, res.placement, 0.5);
    EXPECT_NEAR(res.objective, ref, 1e-6 * ref);
  }
}

TEST(SolveExact, BudgetExhaustedKeepsIncumbent) {
  const auto s = generate_scenario(1);
  SolveOptions opt;
  opt.node_budget = 50;
  const auto res = solve_exact(s.infra, s.requests, 0.5, opt);
  EXPECT_EQ(res.status, SolveStatus::budget_exhausted);
  if (res.has_placement()) EXPECT_TRUE(check_feasibility(res.placement, s.requests, s.infra).empty());
}

TEST(SolveBruteforce, NoRequests) {
  const auto infra = testing::two_node_infra({make_type("A", 2.0)});
  const auto res = solve_bruteforce(infra, {}, 0.5, 10);
  EXPECT_EQ(res.status, SolveStatus::optimal);
  EXPECT_EQ(res.objective, 0.0);
  EXPECT_TRUE(res.placement.deployed.empty());
  EXPECT_EQ(solve_exact(infra, {}, 0.5).objective, 0.0);
}

TEST(SolveBruteforce, RefusesLargeSpaces) {
  const auto s = generate_scenario(1);
  EXPECT_GT(oracle_space(s.infra, s.requests, TierFilter::hybrid), 1'000'000U);
  EXPECT_THROW(solve_bruteforce(s.infra, s.requests, 0.5, 1'000'000), OracleCapacityError);
}

TEST(OracleEquivalence, RandomSmallInstances) {
  int optimal = 0;
  int infeasible = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto inst = testing::random_small_instance(seed);
    const auto exact = solve_exact(inst.infra, inst.requests, inst.alpha);
    const auto brute = solve_bruteforce(inst.infra, inst.requests, inst.alpha, 200'000);
    ASSERT_EQ(exact.status, brute.status) << "seed " << seed;
    if (exact.status == SolveStatus::optimal) {
      EXPECT_NEAR(exact.objective, brute.objective, tol(brute.objective)) << "seed " << seed;
      ++optimal;
    } else {
      ++infeasible;
    }
  }
  EXPECT_GE(optimal, 100);
  EXPECT_GE(infeasible, 1);
}

TEST(OracleEquivalence, RestrictedTiers) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto inst = testing::random_small_instance(seed);
    for (auto tier : {TierFilter::cloud_only, TierFilter::fog_only}) {
      const auto exact = solve_restricted(inst.infra, inst.requests, inst.alpha, tier);
      const auto brute = solve_bruteforce(inst.infra, inst.requests, inst.alpha, 200'000, tier);
      ASSERT_EQ(exact.status, brute.status) << "seed " << seed << " " << to_string(tier);
      if (exact.status == SolveStatus::optimal) {
        EXPECT_NEAR(exact.objective, brute.objective, tol(brute.objective));
        for (const auto& d : exact.placement.deployed) EXPECT_TRUE(admits(tier, inst.infra.nodes()[d.node].tier));
      }
    }
  }
}

// Every traced bound is at most the best objective reachable from its prefix.
TEST(LowerBound, AdmissibleOnEveryTracedNode) {
  std::size_t records = 0;
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    const auto inst = testing::random_small_instance(seed, 5000);
    std::vector<std::pair<std::vector<Assignment>, double>> feasible;
    const auto profiles = profiles_of(inst.requests, inst.infra);
    testing::for_each_complete_assignment(inst.infra, inst.requests, [&](const Placement& p) {
      if (!check_feasibility(p, inst.requests, inst.infra, profiles).empty()) return;
      std::vector<Assignment> flat;
      for (const auto& [r, l] : decision_order(inst.requests)) flat.push_back(*p.at(r, l));
      feasible.emplace_back(std::move(flat), objective_of(p, inst.requests, inst.infra, inst.alpha, profiles));
    });
    SolveOptions opt;
    opt.trace = [&](const TraceRecord& rec) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& [flat, obj] : feasible) {
        if (std::equal(rec.prefix.begin(), rec.prefix.end(), flat.begin())) best = std::min(best, obj);
      }
      EXPECT_EQ(rec.depth, rec.prefix.size());
      if (best < std::numeric_limits<double>::infinity()) {
        EXPECT_LE(rec.bound, best + tol(best)) << "seed " << seed << " depth " << rec.depth;
      }
      ++records;
    };
    const auto res = solve_exact(inst.infra, inst.requests, inst.alpha, opt);
    if (res.status == SolveStatus::optimal) {
      const double best = std::min_element(feasible.begin(), feasible.end(), [](const auto& a, const auto& b) {
                            return a.second < b.second;
                          })->second;
      EXPECT_NEAR(res.objective, best, tol(best));
    } else {
      EXPECT_TRUE(feasible.empty());
    }
  }
  EXPECT_GT(records, 1000U);  // the search must actually branch
}

TEST(Determinism, ThreadCountDoesNotChangeTheResult) {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const auto s = generate_scenario(seed);
    const std::vector<Request> pair{s.requests[0], s.requests[1]};
    std::vector<SolveResult> results;
    for (unsigned threads : {1U, 2U, 4U, 7U}) {
      SolveOptions opt;
      opt.threads = threads;
      results.push_back(solve_exact(s.infra, pair, 0.5, opt));
    }
    for (const auto& r : results) {
      EXPECT_EQ(r.status, results[0].status);
      EXPECT_EQ(r.objective, results[0].objective);  // bit-identical
      EXPECT_EQ(r.placement, results[0].placement);
      EXPECT_EQ(r.nodes_explored, results[0].nodes_explored);
    }
  }
}

TEST(Determinism, TraceIsIdenticalAcrossThreadCounts) {
  const auto inst = testing::random_small_instance(11, 5000);
  std::vector<std::vector<std::pair<double, std::size_t>>> traces(2);
  for (unsigned k = 0; k < 2; ++k) {
    SolveOptions opt;
    opt.threads = k == 0 ? 1 : 4;
    opt.trace = [&](const TraceRecord& rec) { traces[k].emplace_back(rec.bound, rec.depth); };
    (void)solve_exact(inst.infra, inst.requests, inst.alpha, opt);
  }
  EXPECT_EQ(traces[0], traces[1]);
}

TEST(SolveRestricted, TierOrderingsOnReferenceApps) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto s = generate_scenario(seed);
    for (const auto& req : s.requests) {
      const std::vector<Request> one{req};
      const auto cloud = solve_restricted(s.infra, one, 0.5, TierFilter::cloud_only);
      const auto fog = solve_restricted(s.infra, one, 0.5, TierFilter::fog_only);
      const auto hybrid = solve_exact(s.infra, one, 0.5);
      ASSERT_EQ(cloud.status, SolveStatus::optimal);
      ASSERT_EQ(fog.status, SolveStatus::optimal);
      ASSERT_EQ(hybrid.status, SolveStatus::optimal);
      EXPECT_LT(fog.makespan_total, cloud.makespan_total);
      EXPECT_LT(cloud.cost_total, fog.cost_total);
      EXPECT_LE(hybrid.objective, std::min(cloud.objective, fog.objective) + 1e-9);
    }
  }
}

TEST(SolveRestricted, DominanceForEveryAlpha) {
  const auto s = generate_scenario(6);
  const std::vector<Request> one{s.requests[2]};
  for (int k = 0; k <= 10; ++k) {
    const double alpha = 0.1 * k;
    const auto hybrid = solve_exact(s.infra, one, alpha);
    for (auto tier : {TierFilter::cloud_only, TierFilter::fog_only}) {
      const auto r = solve_restricted(s.infra, one, alpha, tier);
      if (r.status == SolveStatus::optimal) EXPECT_LE(hybrid.objective, r.objective + 1e-9);
    }
  }
}

TEST(SolveExact, MonotoneAlphaResponse) {
  for (std::uint64_t seed : {1ULL, 4ULL}) {
    const auto s = generate_scenario(seed);
    const std::vector<Request> pair{s.requests[0], s.requests[1]};
    double prev_cost = std::numeric_limits<double>::infinity();
    double prev_makespan = 0.0;
    for (int k = 0; k <= 10; ++k) {
      const auto r = solve_exact(s.infra, pair, 0.1 * k);
      ASSERT_EQ(r.status, SolveStatus::optimal);
      EXPECT_LE(r.cost_total, prev_cost + 1e-9);
      EXPECT_GE(r.makespan_total, prev_makespan - 1e-9);
      prev_cost = r.cost_total;
      prev_makespan = r.makespan_total;
    }
  }
}

TEST(RandomFeasible, ReproducibleAndDominated) {
  const auto s = generate_scenario(2);
  const std::vector<Request> one{s.requests[0]};
  const auto opt = solve_exact(s.infra, one, 0.5);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto a = random_feasible(s.infra, one, 0.5, seed, 1'000'000);
    const auto b = random_feasible(s.infra, one, 0.5, seed, 1'000'000);
    ASSERT_EQ(a.status, SolveStatus::feasible);
    EXPECT_EQ(a.placement, b.placement);
    EXPECT_TRUE(check_feasibility(a.placement, one, s.infra).empty());
    EXPECT_GE(a.objective, opt.objective - 1e-9);
  }
}

TEST(RandomFeasible, ExhaustsTriesWhenNothingFits) {
  const auto infra = testing::two_node_infra({make_type("A", 9.0)});
  const auto res = random_feasible(infra, {make_request("r", vnf("A"))}, 0.5, 1, 100);
  EXPECT_EQ(res.status, SolveStatus::budget_exhausted);
  EXPECT_FALSE(res.has_placement());
}

}  // namespace
}  // namespace fogweave
