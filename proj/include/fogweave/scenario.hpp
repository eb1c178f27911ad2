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

/// \file scenario.hpp
///
/// The reference evaluation scenario: 2 cloud nodes, 3 fog nodes, 5 IoT
/// devices, fully meshed, and three applications (two 6-VNF chains sharing
/// a historical-storage VNF, and a 7-VNF autonomous-driving tree with a loop
/// and a selection).

#include <algorithm>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fogweave/app_model.hpp"
#include "fogweave/infra_model.hpp"
#include "fogweave/rng.hpp"

namespace fogweave {

struct Scenario {
  Infrastructure infra;
  std::vector<Request> requests;
};

/// A closed interval for uniformly drawn values; lo == hi is a constant.
struct Range {
  double lo = 0.0;
  double hi = 0.0;

  double draw(SplitMix64& rng) const { return lo == hi ? lo : rng.uniform(lo, hi); }
  bool contains(double v) const { return v >= lo && v <= hi; }
};

struct LinkClassParams {
  double bandwidth_mbps = 0.0;
  double cost_per_gb = 0.0;
  Range delay_ms;
};

struct ScenarioParams {
  int cloud_nodes = 2;
  int fog_nodes = 3;
  int devices = 5;
  double cloud_capacity_vcpu = 8.0;
  double fog_capacity_vcpu = 3.0;
  double cloud_cost_per_vcpu = 0.1;
  double fog_cost_per_vcpu = 6.0;

  LinkClassParams iot_fog{54.0, 1.0, {1.0, 2.0}};
  LinkClassParams fog_fog{100.0, 2.0, {0.5, 1.2}};
  LinkClassParams cloud_fog{10000.0, 3.0, {15.0, 35.0}};
  LinkClassParams iot_cloud{10000.0, 4.0, {15.0, 35.0}};
  LinkClassParams cloud_cloud{100000.0, 0.1, {0.64, 0.64}};

  double traffic_kb = 80.0;
  double delay_unit_kb = 80.0;  // traffic that one "per traffic unit" delay refers to
  double license_cost = 100.0;
  int min_requirement_vcpu = 1;
  int max_requirement_vcpu = 4;
  double processing_delay_cloud_ms = 3.12;
  double processing_delay_fog_ms = 0.03;
  int instances_per_type = 1;
  double instance_capacity_requests = 3.0;  // instance capacity in request loads
  double usage_threshold = 1.0;
  double loop_q = 0.25;
  double selection_p = 0.5;
  /// Redraw requirements until each application alone fits the fog tier,
  /// the two sharing applications together fit the cloud tier, and all
  /// applications together fit the whole substrate.
  bool fit_requirements = true;
};

inline const std::string kSharedStorageType = "historical_storage";

namespace detail {

/// Can `items` be packed into `bins` (first-fit search with backtracking)?
inline bool packs(std::vector<double> items, std::vector<double> bins) {
  std::sort(items.rbegin(), items.rend());
  std::function<bool(std::size_t)> place = [&](std::size_t k) {
    if (k == items.size()) return true;
    for (std::size_t b = 0; b < bins.size(); ++b) {
      if (items[k] > bins[b] + 1e-9) continue;
      bool seen = false;  // skip bins with the same remaining space
      for (std::size_t c = 0; c < b; ++c) seen = seen || bins[c] == bins[b];
      if (seen) continue;
      bins[b] -= items[k];
      if (place(k + 1)) return true;
      bins[b] += items[k];
    }
    return false;
  };
  return place(0);
}

}  // namespace detail

/// Application type lists, in the order leaves appear in each tree.
inline std::vector<std::vector<std::string>> reference_app_types() {
  return {
      {"eq_sensing", "eq_filtering", "eq_detection", "eq_localization", "eq_alerting",
       kSharedStorageType},
      {"fl_sensing", "fl_aggregation", "fl_prediction", "fl_risk_mapping", "fl_alerting",
       kSharedStorageType},
      {"ad_sensing", "ad_object_detection", "ad_trajectory_prediction", "ad_collision_risk",
       "ad_emergency_braking", "ad_lane_change", "ad_actuation"},
  };
}

/// The autonomous-driving tree: sense, detect, repeat (predict, assess
/// risk) while a collision risk persists, then brake or change lane, act.
inline StructuredTree autonomous_driving_tree(double q, double p) {
  return {seq({vnf("ad_sensing"), vnf("ad_object_detection"),
               loop(q, {vnf("ad_trajectory_prediction"), vnf("ad_collision_risk")}),
               sel({p, 1.0 - p}, {vnf("ad_emergency_braking"), vnf("ad_lane_change")}),
               vnf("ad_actuation")})};
}

inline Scenario generate_scenario(std::uint64_t seed, const ScenarioParams& params = {}) {
  std::vector<ComputeNode> nodes;
  for (int i = 0; i < params.cloud_nodes; ++i) {
    nodes.push_back({"cloud" + std::to_string(i + 1), Tier::cloud, params.cloud_capacity_vcpu,
                     params.cloud_cost_per_vcpu, params.usage_threshold});
  }
  for (int i = 0; i < params.fog_nodes; ++i) {
    nodes.push_back({"fog" + std::to_string(i + 1), Tier::fog, params.fog_capacity_vcpu,
                     params.fog_cost_per_vcpu, params.usage_threshold});
  }
  std::vector<std::string> devices;
  for (int i = 0; i < params.devices; ++i) devices.push_back("iot" + std::to_string(i + 1));

  SplitMix64 link_rng(derive_seed(seed, 0));
  std::vector<Link> links;
  const auto add_link = [&](const std::string& a, const std::string& b, const LinkClassParams& c) {
    Link l;
    l.id = a + "_" + b;
    l.a = a;
    l.b = b;
    l.bandwidth_bits = c.bandwidth_mbps * kBitsPerMegabit;
    l.cost_per_bit = c.cost_per_gb / kBitsPerGigabit;
    l.delay_ms = c.delay_ms.draw(link_rng);
    l.usage_threshold = params.usage_threshold;
    links.push_back(std::move(l));
  };
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      const Tier a = nodes[i].tier;
      const Tier b = nodes[j].tier;
      const auto& cls = a != b ? params.cloud_fog : (a == Tier::cloud ? params.cloud_cloud : params.fog_fog);
      add_link(nodes[i].id, nodes[j].id, cls);
    }
  }
  for (const auto& d : devices) {
    for (const auto& n : nodes) {
      add_link(d, n.id, n.tier == Tier::cloud ? params.iot_cloud : params.iot_fog);
    }
  }

  const auto app_types = reference_app_types();
  std::vector<std::string> type_ids;
  for (const auto& app : app_types) {
    for (const auto& t : app) {
      if (std::find(type_ids.begin(), type_ids.end(), t) == type_ids.end()) type_ids.push_back(t);
    }
  }
  const auto type_pos = [&](const std::string& t) {
    return static_cast<std::size_t>(std::find(type_ids.begin(), type_ids.end(), t) - type_ids.begin());
  };

  // Requirements: each application is drawn in turn (types already fixed by
  // an earlier application keep their value) until it fits the fog tier on
  // its own; the whole draw restarts if the sharing pair does not fit the
  // cloud tier or the union does not fit the substrate.
  SplitMix64 req_rng(derive_seed(seed, 1));
  std::vector<double> requirement(type_ids.size(), 0.0);
  std::vector<double> fog_bins;
  std::vector<double> cloud_bins;
  std::vector<double> all_bins;
  for (const auto& n : nodes) {
    all_bins.push_back(n.usable_vcpu());
    (n.tier == Tier::fog ? fog_bins : cloud_bins).push_back(n.usable_vcpu());
  }
  const auto pair_fits_cloud = [&] {
    std::vector<double> items;
    for (std::size_t k = 0; k < type_ids.size(); ++k) {
      const auto& t = type_ids[k];
      const bool in_pair = std::find(app_types[0].begin(), app_types[0].end(), t) != app_types[0].end() ||
                           std::find(app_types[1].begin(), app_types[1].end(), t) != app_types[1].end();
      if (in_pair) items.push_back(requirement[k]);
    }
    return detail::packs(items, cloud_bins);
  };
  const auto draw = [&] {
    return static_cast<double>(
        req_rng.uniform_int(params.min_requirement_vcpu, params.max_requirement_vcpu));
  };
  constexpr long kMaxDraws = 10'000'000;
  constexpr int kDrawsPerApp = 100'000;
  long draws = 0;
  for (bool done = false; !done;) {
    std::vector<char> fixed(type_ids.size(), 0);
    bool restart = false;
    for (const auto& app : app_types) {
      bool fits = false;
      for (int attempt = 0; attempt < kDrawsPerApp && !fits; ++attempt) {
        if (++draws > kMaxDraws) {
          throw std::invalid_argument("scenario: no requirement draw fits the fog tier");
        }
        std::vector<double> items;
        for (const auto& t : app) {
          const auto k = type_pos(t);
          if (!fixed[k]) requirement[k] = draw();
          items.push_back(requirement[k]);
        }
        fits = !params.fit_requirements || detail::packs(items, fog_bins);
      }
      if (!fits) {
        restart = true;
        break;
      }
      for (const auto& t : app) fixed[type_pos(t)] = 1;
    }
    done = !restart && (!params.fit_requirements ||
                        (pair_fits_cloud() && detail::packs(requirement, all_bins)));
  }

  const double traffic = params.traffic_kb * kBitsPerKilobyte;
  std::vector<VnfType> catalog;
  for (std::size_t k = 0; k < type_ids.size(); ++k) {
    catalog.push_back({type_ids[k], params.license_cost, params.instance_capacity_requests * traffic,
                       requirement[k], params.instances_per_type, params.processing_delay_cloud_ms,
                       params.processing_delay_fog_ms});
  }

  Scenario s{Infrastructure(std::move(nodes), devices, std::move(links), std::move(catalog),
                            params.delay_unit_kb * kBitsPerKilobyte, params.usage_threshold),
             {}};
  const auto chain = [](const std::vector<std::string>& types) {
    std::vector<TreeNode> leaves;
    for (const auto& t : types) leaves.push_back(vnf(t));
    return StructuredTree{seq(std::move(leaves))};
  };
  s.requests.push_back({"app1", chain(app_types[0]), traffic, {devices.at(0)}});
  s.requests.push_back({"app2", chain(app_types[1]), traffic, {devices.at(1)}});
  s.requests.push_back({"app3", autonomous_driving_tree(params.loop_q, params.selection_p), traffic,
                        {devices.at(2)}});
  return s;
}

}  // namespace fogweave
