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
#include <map>
#include <sstream>

#include "fogweave/evaluation.hpp"
#include "fogweave/lp_format.hpp"
#include "fogweave/milp.hpp"
#include "fogweave/scenario.hpp"
#include "fogweave/solver.hpp"
#include "milp_support.hpp"
#include "test_support.hpp"

namespace fogweave {
namespace {

using testing::make_request;
using testing::make_type;
using testing::row_holds;
using testing::row_lhs;
using testing::row_named;

TEST(PlacementMilp, SingleVnfCounts) {
  const auto infra = testing::two_node_infra({make_type("A", 2.0)});
  const std::vector<Request> reqs{make_request("r", vnf("A"))};
  const PlacementMilp milp(infra, reqs, 0.5);
  const auto& m = milp.model();
  EXPECT_EQ(m.count(VarFamily::deploy), 2U);
  EXPECT_EQ(m.count(VarFamily::assign), 2U);
  EXPECT_EQ(m.count(VarFamily::device), 2U);
  EXPECT_EQ(m.count(VarFamily::edge), 0U);
  EXPECT_EQ(m.count(VarFamily::pair), 0U);
  EXPECT_EQ(m.count(VarFamily::par_max), 0U);
  EXPECT_EQ(m.variables.size(), 6U);
  EXPECT_EQ(m.count_rows("one_assign"), 1U);
  EXPECT_EQ(m.count_rows("assign_deployed"), 2U);
  EXPECT_EQ(m.count_rows("cover"), 1U);
  EXPECT_EQ(m.count_rows("cap_node"), 2U);
  EXPECT_EQ(m.count_rows("cap_instance"), 2U);  // one per instance and host node
  EXPECT_EQ(m.count_rows("device_attach"), 2U);
  EXPECT_EQ(m.count_rows("cap_device_link"), 2U);
  EXPECT_EQ(m.count_rows("single_host"), 1U);
}

TEST(PlacementMilp, AlphaOneDropsMakespanTerms) {
  const auto s = generate_scenario(2);
  const PlacementMilp milp(s.infra, {s.requests[2]}, 1.0);
  const auto& m = milp.model();
  for (std::size_t j = 0; j < m.variables.size(); ++j) {
    if (m.variables[j].family == VarFamily::par_max) EXPECT_EQ(m.objective[j], 0.0);
  }
  // With alpha = 1 an assign coefficient is w * gamma * u + license only.
  const auto ann = annotate_leaves(s.requests[2].tree);
  const auto& type = s.infra.catalog()[*s.infra.type_index(ann[3].type_id)];
  const auto j = *m.find("assign.app3.3.0.fog1");
  EXPECT_NEAR(m.objective[j], ann[3].node_weight * 6.0 * type.requirement_vcpu + 100.0, 1e-12);
}

TEST(PlacementMilp, RejectsAlphaOutOfRange) {
  const auto infra = testing::two_node_infra({make_type("A", 2.0)});
  EXPECT_THROW(PlacementMilp(infra, {make_request("r", vnf("A"))}, 1.5), std::invalid_argument);
  EXPECT_THROW(PlacementMilp(infra, {make_request("r", vnf("A"))}, -0.1), std::invalid_argument);
}

TEST(PlacementMilp, PairFamilyOnTwoNodes) {
  for (int instances : {1, 2}) {
    const auto infra = testing::two_node_infra({make_type("A", 1.0, instances), make_type("B", 1.0, instances)});
    const std::vector<Request> reqs{make_request("r", seq({vnf("A"), vnf("B")}))};
    const PlacementMilp m_milp(infra, reqs, 0.5);
    const auto& m = m_milp.model();
    // Ordered node pairs s != t joined by a link, times instance pairs.
    const std::size_t expected = 2 * static_cast<std::size_t>(instances * instances);
    EXPECT_EQ(m.count(VarFamily::pair), expected);
    for (const char* family : {"pair_edge", "pair_pred", "pair_leaf", "pair_both"}) {
      EXPECT_EQ(m.count_rows(family), expected) << family;
    }
    EXPECT_EQ(m.count(VarFamily::edge), 1U);
    EXPECT_EQ(m.count_rows("edge_use"), 1U);
  }
}

TEST(PlacementMilp, ZeroVectorHasZeroObjectiveButIsInfeasible) {
  const auto s = generate_scenario(1);
  const PlacementMilp milp(s.infra, s.requests, 0.5);
  const std::vector<double> zero(milp.model().variables.size(), 0.0);
  EXPECT_EQ(milp.objective_at(zero), 0.0);
  EXPECT_FALSE(milp.satisfies(zero));
  EXPECT_THROW(milp.objective_at(std::vector<double>(3, 0.0)), std::invalid_argument);
}

TEST(PlacementMilp, SingleVnfOptimumAtAlphaOneEqualsCost) {
  const auto infra = testing::two_node_infra({make_type("A", 2.0)});
  const std::vector<Request> reqs{make_request("r", vnf("A"))};
  const PlacementMilp milp(infra, reqs, 1.0);
  const auto res = solve_exact(infra, reqs, 1.0);
  ASSERT_EQ(res.status, SolveStatus::optimal);
  const auto v = milp.encode(res.placement);
  EXPECT_TRUE(milp.satisfies(v)) << milp.first_violated(v);
  EXPECT_NEAR(milp.objective_at(v), cost_of(res.placement, 0, reqs[0], infra).total, 1e-12);
  EXPECT_NEAR(milp.objective_at(v), 100.20256, 1e-9);
}

TEST(PlacementMilp, MovingFromCloudToFogShiftsObjectiveByCoefficientDelta) {
  const auto infra = testing::two_node_infra({make_type("A", 2.0)});
  const std::vector<Request> reqs{make_request("r", vnf("A"))};
  const double bits = 80 * kBitsPerKilobyte;
  for (double alpha : {0.0, 0.3, 1.0}) {
    const PlacementMilp milp(infra, reqs, alpha);
    Placement cloud = Placement::empty_for(reqs);
    cloud.assign(0, 0, {{0, 0}, 0});
    Placement fog = Placement::empty_for(reqs);
    fog.assign(0, 0, {{0, 0}, 1});
    const double delta_cost = (6.0 - 0.1) * 2.0 + bits * (1.0 - 4.0) / kBitsPerGigabit;
    const double delta_delay = (0.03 - 3.12) + (1.5 - 25.0);
    EXPECT_NEAR(milp.objective_at(milp.encode(fog)) - milp.objective_at(milp.encode(cloud)),
                alpha * delta_cost + (1 - alpha) * delta_delay, 1e-9);
  }
}

// Every pair variable, for every parent combination: the four rows admit
// exactly q = a * b (with the edge variable free to be 1).
TEST(Linearization, FourCaseExactness) {
  const auto s = generate_scenario(3);
  const PlacementMilp milp(s.infra, {s.requests[0], s.requests[2]}, 0.5);
  const auto& m = milp.model();
  std::size_t checked = 0;
  for (std::size_t q = 0; q < m.variables.size(); ++q) {
    if (m.variables[q].family != VarFamily::pair) continue;
    const std::string suffix = m.variables[q].name.substr(5);
    const Row* edge = row_named(m, "pair_edge." + suffix);
    const Row* pred = row_named(m, "pair_pred." + suffix);
    const Row* leaf = row_named(m, "pair_leaf." + suffix);
    const Row* both = row_named(m, "pair_both." + suffix);
    ASSERT_TRUE(edge && pred && leaf && both) << suffix;
    const auto other = [&](const Row* r) {
      for (const auto& t : r->terms) {
        if (t.var != q) return t.var;
      }
      return q;
    };
    const std::size_t a = other(pred);
    const std::size_t b = other(leaf);
    const std::size_t y = other(edge);
    std::vector<double> v(m.variables.size(), 0.0);
    for (int va : {0, 1}) {
      for (int vb : {0, 1}) {
        std::set<int> admitted;
        for (int vq : {0, 1}) {
          v[a] = va;
          v[b] = vb;
          v[y] = 1.0;
          v[q] = vq;
          if (row_holds(*edge, v) && row_holds(*pred, v) && row_holds(*leaf, v) && row_holds(*both, v)) {
            admitted.insert(vq);
          }
        }
        ASSERT_EQ(admitted, std::set<int>{va * vb}) << suffix << " a=" << va << " b=" << vb;
        // The edge variable cannot stay 0 when both endpoints are chosen.
        v[y] = 0.0;
        v[q] = va * vb;
        EXPECT_EQ(row_holds(*edge, v), va * vb == 0);
      }
    }
    ++checked;
  }
  EXPECT_GT(checked, 100U);
}

TEST(Encoding, SatisfiesIffFeasibleOverAllCompleteAssignments) {
  int feasible = 0;
  int infeasible = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto inst = testing::random_small_instance(seed, 3000);
    const PlacementMilp milp(inst.infra, inst.requests, inst.alpha);
    testing::for_each_complete_assignment(inst.infra, inst.requests, [&](const Placement& p) {
      bool routable = true;
      for (std::size_t r = 0; r < inst.requests.size() && routable; ++r) {
        try {
          (void)cost_of(p, r, inst.requests[r], inst.infra);
        } catch (const InfeasibleRouteError&) {
          routable = false;
        }
      }
      const bool ok = check_feasibility(p, inst.requests, inst.infra).empty();
      const auto v = milp.encode(p);
      ASSERT_EQ(milp.satisfies(v), ok && routable) << "seed " << seed << ": " << milp.first_violated(v);
      if (ok) {
        EXPECT_EQ(milp.decode(v), p);
        const double expected = objective_of(p, inst.requests, inst.infra, inst.alpha, profiles_of(inst.requests, inst.infra));
        EXPECT_NEAR(milp.objective_at(v), expected, 1e-6 * std::max(1.0, std::abs(expected)));
        ++feasible;
      } else {
        ++infeasible;
      }
    });
  }
  EXPECT_GT(feasible, 200);
  EXPECT_GT(infeasible, 200);
}

TEST(Encoding, ParMaxIsTightAtTheOptimum) {
  const auto infra = testing::two_node_infra(
      {make_type("X", 1.0), make_type("A", 1.0), make_type("B", 2.0), make_type("C", 1.0)});
  const std::vector<Request> reqs{make_request("r", seq({vnf("X"), par({vnf("A"), seq({vnf("B"), vnf("C")})})}))};
  for (double alpha : {0.0, 0.5, 0.9}) {
    const PlacementMilp milp(infra, reqs, alpha);
    const auto res = solve_exact(infra, reqs, alpha);
    ASSERT_EQ(res.status, SolveStatus::optimal);
    auto v = milp.encode(res.placement);
    ASSERT_TRUE(milp.satisfies(v));
    const auto& m = milp.model();
    for (std::size_t z = 0; z < m.variables.size(); ++z) {
      if (m.variables[z].family != VarFamily::par_max) continue;
      EXPECT_GT(m.objective[z], 0.0);
      double row_max = 0.0;
      for (const auto& row : m.rows) {
        const bool mine = std::any_of(row.terms.begin(), row.terms.end(), [&](const Term& t) { return t.var == z; });
        if (!mine || row.name.rfind("par_bound", 0) != 0) continue;
        row_max = std::max(row_max, v[z] - row_lhs(row, v));
      }
      EXPECT_NEAR(v[z], row_max, 1e-12) << m.variables[z].name;
      if (v[z] > 0.0) {
        v[z] -= 1e-6;  // any lower value breaks a bound row
        EXPECT_FALSE(milp.satisfies(v, 1e-9));
        v[z] += 1e-6;
      }
    }
  }
}

TEST(LpFormat, SingleVnfDeclaresSixBinaries) {
  const auto infra = testing::two_node_infra({make_type("A", 2.0)});
  const PlacementMilp milp(infra, {make_request("r", vnf("A"))}, 0.5);
  const std::string lp = to_lp(milp.model());
  const auto start = lp.find("Binaries\n");
  const auto end = lp.find("End");
  ASSERT_NE(start, std::string::npos);
  std::istringstream names(lp.substr(start + 9, end - start - 9));
  std::string name;
  int count = 0;
  while (names >> name) ++count;
  EXPECT_EQ(count, 6);
  EXPECT_NE(lp.find("Minimize"), std::string::npos);
  EXPECT_NE(lp.find("Subject To"), std::string::npos);
}

TEST(LpFormat, ParMaxIsContinuousInBounds) {
  const auto s = generate_scenario(1);
  const PlacementMilp m_milp(s.infra, {s.requests[2]}, 0.5);
  const auto& m = m_milp.model();
  EXPECT_EQ(m.count(VarFamily::par_max), 0U);  // this tree has no parallel block
  EXPECT_EQ(to_lp(m).find("Bounds"), std::string::npos);
  const std::vector<Request> with_par{make_request(
      "p", seq({vnf("ad_sensing"), par({vnf("ad_lane_change"), vnf("ad_actuation")})}), {"iot1"})};
  const PlacementMilp m2_milp(s.infra, with_par, 0.5);
    const auto& m2 = m2_milp.model();
  const std::string lp2 = to_lp(m2);
  const std::string sec2 = lp2.substr(lp2.find("Bounds\n"), lp2.find("Binaries\n") - lp2.find("Bounds\n"));
  EXPECT_NE(sec2.find(" par_max.proc.p.0 >= 0"), std::string::npos);
  EXPECT_NE(sec2.find(" par_max.comm.p.0 >= 0"), std::string::npos);
  const std::string bins = lp2.substr(lp2.find("Binaries\n"));
  EXPECT_EQ(bins.find("par_max"), std::string::npos);
}

TEST(LpFormat, RoundTripIsExactAndByteIdentical) {
  for (std::uint64_t seed : {1ULL, 2ULL}) {
    const auto s = generate_scenario(seed);
    const PlacementMilp m_milp(s.infra, s.requests, 0.37);
    const auto& m = m_milp.model();
    const std::string first = to_lp(m);
    const MilpModel back = parse_lp(first);
    ASSERT_EQ(back.variables.size(), m.variables.size());
    for (std::size_t j = 0; j < m.variables.size(); ++j) {
      EXPECT_EQ(back.variables[j].name, m.variables[j].name);
      EXPECT_EQ(back.variables[j].binary, m.variables[j].binary);
      EXPECT_EQ(back.variables[j].family, m.variables[j].family);
      EXPECT_EQ(back.objective[j], m.objective[j]);
    }
    ASSERT_EQ(back.rows.size(), m.rows.size());
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
      EXPECT_EQ(back.rows[i].name, m.rows[i].name);
      EXPECT_EQ(back.rows[i].sense, m.rows[i].sense);
      EXPECT_EQ(back.rows[i].rhs, m.rows[i].rhs);
      EXPECT_EQ(back.rows[i].terms, m.rows[i].terms);
    }
    EXPECT_EQ(to_lp(back), first);
  }
}

TEST(LpFormat, ParseErrorsCarryLineNumbers) {
  try {
    (void)parse_lp("Minimize\n obj: 1 x\nSubject To\n c1: 1 x <== 2\nEnd\n");
    FAIL() << "expected LpParseError";
  } catch (const LpParseError& e) {
    EXPECT_NE(std::string(e.what()).find("4"), std::string::npos) << e.what();
  }
}

TEST(Manifest, OneLinePerVariable) {
  const auto infra = testing::two_node_infra({make_type("A", 2.0)});
  const PlacementMilp m_milp(infra, {make_request("r", vnf("A"))}, 0.5);
    const auto& m = m_milp.model();
  std::ostringstream os;
  write_manifest_csv(os, m);
  const std::string csv = os.str();
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
  EXPECT_EQ(csv.rfind("index,name,family,kind,objective\n", 0), 0U);
}

}  // namespace
}  // namespace fogweave
