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

#include <cmath>
#include <map>
#include <stdexcept>

#include "fogweave/infra_model.hpp"
#include "fogweave/scenario.hpp"
#include "test_support.hpp"

namespace fogweave {
namespace {

using testing::make_link;
using testing::make_type;

TEST(LinkBetween, ReferenceTopologyHasCloudFogLink) {
  const auto s = generate_scenario(1);
  const auto l = link_between(s.infra, "cloud1", "fog2");
  ASSERT_TRUE(l.has_value());
  EXPECT_EQ(l->cls, LinkClass::cloud_fog);
  EXPECT_EQ(l->bandwidth_bits, 10000 * kBitsPerMegabit);
  const auto back = link_between(s.infra, "fog2", "cloud1");
  ASSERT_TRUE(back.has_value());
  EXPECT_EQ(back->id, l->id);
}

TEST(LinkBetween, Errors) {
  const auto infra = testing::two_node_infra({make_type("A", 1.0)});
  EXPECT_THROW(link_between(infra, "fog1", "fog1"), std::invalid_argument);
  EXPECT_THROW(link_between(infra, "fog1", "nowhere"), std::out_of_range);
}

TEST(LinkBetween, SparseTopologyReturnsNone) {
  std::vector<ComputeNode> nodes{{"a", Tier::fog, 3, 6, 1}, {"b", Tier::fog, 3, 6, 1}, {"c", Tier::cloud, 8, 0.1, 1}};
  Infrastructure infra(std::move(nodes), {"d"}, {make_link("a", "c", 10, 1, 1)}, {}, 80 * kBitsPerKilobyte);
  EXPECT_FALSE(link_between(infra, "a", "b").has_value());
  EXPECT_TRUE(link_between(infra, "c", "a").has_value());
}

TEST(Infrastructure, ClassifiesLinks) {
  const auto s = generate_scenario(3);
  std::map<LinkClass, int> count;
  for (const auto& l : s.infra.links()) ++count[l.cls];
  EXPECT_EQ(count[LinkClass::cloud_cloud], 1);
  EXPECT_EQ(count[LinkClass::fog_fog], 3);
  EXPECT_EQ(count[LinkClass::cloud_fog], 6);
  EXPECT_EQ(count[LinkClass::iot_cloud], 10);
  EXPECT_EQ(count[LinkClass::iot_fog], 15);
}

TEST(Infrastructure, RejectsInvalidInput) {
  const auto node = [](std::string id, double cap) { return ComputeNode{std::move(id), Tier::fog, cap, 1.0, 1.0}; };
  const double unit = 80 * kBitsPerKilobyte;
  EXPECT_THROW(Infrastructure({node("a", 0.0)}, {}, {}, {}, unit), InfrastructureError);
  EXPECT_THROW(Infrastructure({node("a", 1), node("a", 1)}, {}, {}, {}, unit), InfrastructureError);
  EXPECT_THROW(Infrastructure({node("a", 1), node("b", 1)}, {},
                              {make_link("a", "b", 1, 1, 1), make_link("b", "a", 1, 1, 1)}, {}, unit),
               InfrastructureError);
  EXPECT_THROW(Infrastructure({node("a", 1)}, {"d", "e"}, {make_link("d", "e", 1, 1, 1)}, {}, unit),
               InfrastructureError);
  EXPECT_THROW(Infrastructure({node("a", 1)}, {}, {make_link("a", "x", 1, 1, 1)}, {}, unit), InfrastructureError);
  auto bad_type = make_type("t", 1.0);
  bad_type.instance_count = 0;
  EXPECT_THROW(Infrastructure({node("a", 1)}, {}, {}, {bad_type}, unit), InfrastructureError);
  auto bad_mu = node("a", 1);
  bad_mu.usage_threshold = 1.5;
  EXPECT_THROW(Infrastructure({bad_mu}, {}, {}, {}, unit), InfrastructureError);
}

TEST(GenerateScenario, ReferenceShape) {
  const auto s = generate_scenario(7);
  int cloud = 0;
  int fog = 0;
  for (const auto& n : s.infra.nodes()) {
    if (n.tier == Tier::cloud) {
      ++cloud;
      EXPECT_EQ(n.capacity_vcpu, 8.0);
      EXPECT_EQ(n.cost_per_vcpu, 0.1);
    } else {
      ++fog;
      EXPECT_EQ(n.capacity_vcpu, 3.0);
      EXPECT_EQ(n.cost_per_vcpu, 6.0);
    }
    EXPECT_EQ(n.usage_threshold, 1.0);
  }
  EXPECT_EQ(cloud, 2);
  EXPECT_EQ(fog, 3);
  EXPECT_EQ(s.infra.devices().size(), 5U);
  int compute_links = 0;
  for (const auto& l : s.infra.links()) {
    compute_links += s.infra.node_index(l.a) && s.infra.node_index(l.b) ? 1 : 0;
  }
  EXPECT_EQ(compute_links, 10);
  ASSERT_EQ(s.requests.size(), 3U);
  EXPECT_EQ(s.requests[0].tree.leaf_count(), 6U);
  EXPECT_EQ(s.requests[1].tree.leaf_count(), 6U);
  EXPECT_EQ(s.requests[2].tree.leaf_count(), 7U);
  EXPECT_TRUE(s.requests[0].required_types().count(kSharedStorageType));
  EXPECT_TRUE(s.requests[1].required_types().count(kSharedStorageType));
  for (const auto& r : s.requests) EXPECT_EQ(r.traffic_bits, 80 * kBitsPerKilobyte);
  for (const auto& t : s.infra.catalog()) {
    EXPECT_EQ(t.license_cost, 100.0);
    EXPECT_EQ(t.delay_cloud_ms, 3.12);
    EXPECT_EQ(t.delay_fog_ms, 0.03);
    EXPECT_EQ(t.requirement_vcpu, std::round(t.requirement_vcpu));
    EXPECT_GE(t.requirement_vcpu, 1.0);
    EXPECT_LE(t.requirement_vcpu, 4.0);
  }
  EXPECT_TRUE(validate_scenario(s.infra, s.requests).ok());
}

TEST(GenerateScenario, DrivingLoopHasOneThirdIterations) {
  const auto s = generate_scenario(2);
  const auto a = annotate_leaves(s.requests[2].tree);
  EXPECT_NEAR(a[2].node_weight, 0.33, 0.005);
}

TEST(GenerateScenario, DeterministicPerSeed) {
  for (std::uint64_t seed : {1ULL, 42ULL, 9999ULL}) {
    const auto a = generate_scenario(seed);
    const auto b = generate_scenario(seed);
    EXPECT_EQ(a.infra.nodes(), b.infra.nodes());
    EXPECT_EQ(a.infra.links(), b.infra.links());
    EXPECT_EQ(a.infra.catalog(), b.infra.catalog());
    EXPECT_EQ(a.requests, b.requests);
  }
  EXPECT_NE(generate_scenario(1).infra.links(), generate_scenario(2).infra.links());
}

TEST(GenerateScenario, DelaysWithinClassRanges) {
  const ScenarioParams p;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = generate_scenario(seed, p);
    for (const auto& l : s.infra.links()) {
      const LinkClassParams& c = l.cls == LinkClass::iot_fog       ? p.iot_fog
                                 : l.cls == LinkClass::fog_fog     ? p.fog_fog
                                 : l.cls == LinkClass::cloud_fog   ? p.cloud_fog
                                 : l.cls == LinkClass::iot_cloud   ? p.iot_cloud
                                                                   : p.cloud_cloud;
      EXPECT_TRUE(c.delay_ms.contains(l.delay_ms)) << l.id << " " << l.delay_ms;
      EXPECT_EQ(l.bandwidth_bits, c.bandwidth_mbps * kBitsPerMegabit);
      EXPECT_DOUBLE_EQ(l.cost_per_bit * kBitsPerGigabit, c.cost_per_gb);
    }
  }
}

TEST(GenerateScenario, RequirementsFitTheirTiers) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = generate_scenario(seed);
    double total = 0.0;
    for (const auto& t : s.infra.catalog()) total += t.requirement_vcpu;
    EXPECT_LE(total, 2 * 8.0 + 3 * 3.0);
  }
}

TEST(Units, TrafficAgainstPerGigabitPrices) {
  const double bits = 80 * kBitsPerKilobyte;
  EXPECT_DOUBLE_EQ(bits / kBitsPerGigabit, 6.4e-4);
  const Link l = make_link("a", "b", 54, 4.0, 1.0);
  EXPECT_NEAR(bits * l.cost_per_bit, 4.0 * 6.4e-4, 1e-18);
}

}  // namespace
}  // namespace fogweave
