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

#include <vector>

#include "fogweave/montecarlo.hpp"
#include "fogweave/scenario.hpp"
#include "fogweave/solver.hpp"
#include "test_support.hpp"

namespace fogweave {
namespace {

using testing::make_request;

// Types with distinct cloud delays so hand-computed expectations differ per branch.
VnfType timed_type(std::string id, double cloud_ms) {
  return {std::move(id), 100.0, 240 * kBitsPerKilobyte, 1.0, 1, cloud_ms, 0.03};
}

Infrastructure timed_infra() {
  return testing::two_node_infra(
      {timed_type("A", 10.0), timed_type("B", 20.0), timed_type("C", 14.0), timed_type("D", 3.0)});
}

// Every leaf on the cloud node (index 0), instance 0.
Placement all_on_cloud(const Infrastructure& infra, const Request& req) {
  Placement p = Placement::empty_for({req});
  const auto types = req.tree.leaf_types();
  for (std::size_t l = 0; l < types.size(); ++l) p.assign(0, l, {{*infra.type_index(types[l]), 0}, 0});
  return p;
}

constexpr double kDeviceToCloudMs = 25.0;  // two_node_infra default

TEST(MonteCarlo, DeterministicTreeHasZeroVariance) {
  const auto infra = timed_infra();
  const auto req = make_request("r", seq({vnf("A"), par({vnf("B"), vnf("C")}), vnf("D")}));
  const auto rep = compare_to_analytic(all_on_cloud(infra, req), 0, req, infra, 2000, 7);
  EXPECT_EQ(rep.makespan.stderr_mean, 0.0);
  EXPECT_EQ(rep.cost.stderr_mean, 0.0);
  EXPECT_NEAR(rep.makespan.mean, 10.0 + 20.0 + 3.0 + kDeviceToCloudMs, 1e-9);
  EXPECT_NEAR(rep.makespan.analytic, rep.makespan.mean, 1e-9);
  EXPECT_TRUE(rep.makespan_exact);
  EXPECT_TRUE(rep.passed());
  EXPECT_EQ(rep.cost_check, Check::pass);
}

TEST(MonteCarlo, LoopAddsExpectedExtraIterations) {
  const auto infra = timed_infra();
  const auto once = make_request("r", vnf("A"));
  const auto looped = make_request("r", seq({vnf("A"), loop(0.25, {vnf("D")})}));
  const auto base = compare_to_analytic(all_on_cloud(infra, once), 0, once, infra, 1000, 1);
  const auto rep = compare_to_analytic(all_on_cloud(infra, looped), 0, looped, infra, 100'000, 1);
  // q/(1-q) = 1/3 iterations of a 3 ms body: 1 ms extra on average.
  EXPECT_NEAR(rep.makespan.analytic - base.makespan.analytic, 1.0, 1e-12);
  EXPECT_NEAR(rep.makespan.mean - base.makespan.mean, 1.0, 3.0 * rep.makespan.stderr_mean);
  EXPECT_GT(rep.makespan.stderr_mean, 0.0);
  EXPECT_TRUE(rep.passed());
  EXPECT_NEAR(rep.visits[1].analytic, 1.0 / 3.0, 1e-12);
}

TEST(MonteCarlo, SelectionAveragesBranches) {
  const auto infra = timed_infra();
  const auto req = make_request("r", sel({0.5, 0.5}, {vnf("A"), vnf("B")}));
  const auto rep = compare_to_analytic(all_on_cloud(infra, req), 0, req, infra, 50'000, 3);
  EXPECT_NEAR(rep.makespan.analytic, 15.0 + kDeviceToCloudMs, 1e-12);
  EXPECT_TRUE(rep.makespan.within(3.0));
  ASSERT_EQ(rep.visits.size(), 2U);
  EXPECT_NEAR(rep.visits[0].mean, 0.5, 3.0 * rep.visits[0].stderr_mean);
  EXPECT_TRUE(rep.passed());
}

TEST(MonteCarlo, StochasticParallelIsOnlyALowerBound) {
  const auto infra = timed_infra();
  const auto req = make_request("r", par({sel({0.5, 0.5}, {vnf("A"), vnf("B")}), seq({vnf("C")})}));
  const auto rep = compare_to_analytic(all_on_cloud(infra, req), 0, req, infra, 20'000, 5);
  EXPECT_FALSE(rep.makespan_exact);
  // max(E[branch]) = 15 while E[max] = 0.5 * 14 + 0.5 * 20 = 17.
  EXPECT_NEAR(rep.makespan.analytic, 15.0 + kDeviceToCloudMs, 1e-12);
  EXPECT_NEAR(rep.makespan.mean, 17.0 + kDeviceToCloudMs, 3.0 * rep.makespan.stderr_mean);
  EXPECT_LT(rep.makespan.analytic, rep.makespan.mean);
  EXPECT_EQ(rep.makespan_check, Check::pass);
}

TEST(MonteCarlo, ReferenceAppMatchesAnalytic) {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const auto s = generate_scenario(seed);
    for (std::size_t r = 0; r < s.requests.size(); ++r) {
      const auto res = solve_exact(s.infra, {s.requests[r]}, 0.5);
      ASSERT_EQ(res.status, SolveStatus::optimal);
      const auto rep = compare_to_analytic(res.placement, 0, s.requests[r], s.infra, 20'000, seed);
      EXPECT_TRUE(rep.passed()) << "seed " << seed << " request " << r;
      EXPECT_EQ(rep.truncated_loops, 0U);
      const auto profile = RequestProfile::of(s.requests[r], s.infra);
      for (std::size_t l = 0; l < rep.visits.size(); ++l) {
        EXPECT_DOUBLE_EQ(rep.visits[l].analytic, profile.leaves[l].node_weight);
      }
    }
  }
}

TEST(MonteCarlo, SingleSampleEqualsOneTrace) {
  const auto infra = timed_infra();
  const auto req = make_request("r", seq({sel({0.3, 0.7}, {vnf("A"), vnf("B")}), loop(0.4, {vnf("D")})}));
  const auto p = all_on_cloud(infra, req);
  const auto rep = compare_to_analytic(p, 0, req, infra, 1, 99);
  const auto trace = sample_execution(p, 0, req, infra, derive_seed(99, 0));
  EXPECT_EQ(rep.makespan.mean, trace.makespan);
  EXPECT_EQ(rep.cost.mean, trace.cost);
  EXPECT_FALSE(rep.assertions_applied());
  EXPECT_EQ(rep.cost_check, Check::skipped);
  EXPECT_EQ(rep.makespan_check, Check::skipped);
}

TEST(MonteCarlo, ReproducibleAcrossRunsAndThreads) {
  const auto infra = timed_infra();
  const auto req = make_request("r", seq({sel({0.3, 0.7}, {vnf("A"), vnf("B")}), loop(0.4, {vnf("D")})}));
  const auto p = all_on_cloud(infra, req);
  const auto a = compare_to_analytic(p, 0, req, infra, 30'000, 11, 1);
  const auto b = compare_to_analytic(p, 0, req, infra, 30'000, 11, 4);
  EXPECT_EQ(a.makespan.mean, b.makespan.mean);
  EXPECT_EQ(a.makespan.stderr_mean, b.makespan.stderr_mean);
  EXPECT_EQ(a.cost.mean, b.cost.mean);
  const auto c = compare_to_analytic(p, 0, req, infra, 30'000, 12, 1);
  EXPECT_NE(a.makespan.mean, c.makespan.mean);
}

TEST(MonteCarlo, TraceVisitsFollowTheTree) {
  const auto infra = timed_infra();
  const auto req = make_request("r", seq({vnf("A"), sel({0.5, 0.5}, {vnf("B"), vnf("C")}), loop(0.9, {vnf("D")})}));
  const auto p = all_on_cloud(infra, req);
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto t = sample_execution(p, 0, req, infra, s);
    EXPECT_EQ(t.visits[0], 1U);
    EXPECT_EQ(t.visits[1] + t.visits[2], 1U);
        const double expected = kDeviceToCloudMs + 10.0 + (t.visits[1] ? 20.0 : 14.0) + 3.0 * t.visits[3];
    EXPECT_NEAR(t.makespan, expected, 1e-9);
  }
}

}  // namespace
}  // namespace fogweave
