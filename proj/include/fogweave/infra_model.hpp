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

/// \file infra_model.hpp
///
/// The hybrid cloud/fog substrate. Traffic is carried in bits; link costs
/// are per bit and bandwidths are bits per period. Delays (link and VNF
/// processing) are milliseconds per "delay unit" of traffic, whose size in
/// bits is a property of the infrastructure.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fogweave/app_model.hpp"

namespace fogweave {

inline constexpr double kBitsPerKilobyte = 8.0 * 1000.0;
inline constexpr double kBitsPerMegabit = 1e6;
inline constexpr double kBitsPerGigabit = 1e9;

enum class Tier { cloud, fog };

inline const char* to_string(Tier tier) { return tier == Tier::cloud ? "cloud" : "fog"; }

enum class LinkClass { cloud_cloud, fog_fog, cloud_fog, iot_cloud, iot_fog };

inline const char* to_string(LinkClass cls) {
  switch (cls) {
    case LinkClass::cloud_cloud: return "cloud-cloud";
    case LinkClass::fog_fog: return "fog-fog";
    case LinkClass::cloud_fog: return "cloud-fog";
    case LinkClass::iot_cloud: return "iot-cloud";
    case LinkClass::iot_fog: return "iot-fog";
  }
  return "?";
}

struct ComputeNode {
  std::string id;
  Tier tier = Tier::cloud;
  double capacity_vcpu = 0.0;
  double cost_per_vcpu = 0.0;
  double usage_threshold = 1.0;

  double usable_vcpu() const noexcept { return usage_threshold * capacity_vcpu; }

  friend bool operator==(const ComputeNode&, const ComputeNode&) = default;
};

struct Link {
  std::string id;
  std::string a;
  std::string b;
  LinkClass cls = LinkClass::cloud_cloud;
  double bandwidth_bits = 0.0;
  double cost_per_bit = 0.0;
  double delay_ms = 0.0;
  double usage_threshold = 1.0;

  double usable_bits() const noexcept { return usage_threshold * bandwidth_bits; }

  friend bool operator==(const Link&, const Link&) = default;
};

/// Instance `index` of catalog type `type`.
struct VnfInstanceRef {
  std::size_t type = 0;
  int index = 0;

  friend auto operator<=>(const VnfInstanceRef&, const VnfInstanceRef&) = default;
};

class InfrastructureError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Immutable substrate: compute nodes, IoT devices, links and the VNF
/// catalog. Endpoints are indexed with compute nodes first, then devices.
class Infrastructure {
 public:
  static constexpr int kNoLink = -1;

  Infrastructure() = default;

  Infrastructure(std::vector<ComputeNode> nodes, std::vector<std::string> devices,
                 std::vector<Link> links, std::vector<VnfType> catalog,
                 double delay_unit_bits, double vnf_usage_threshold = 1.0)
      : nodes_(std::move(nodes)),
        devices_(std::move(devices)),
        links_(std::move(links)),
        catalog_(std::move(catalog)),
        delay_unit_bits_(delay_unit_bits),
        vnf_usage_threshold_(vnf_usage_threshold) {
    build_indices();
  }

  const std::vector<ComputeNode>& nodes() const noexcept { return nodes_; }
  const std::vector<std::string>& devices() const noexcept { return devices_; }
  const std::vector<Link>& links() const noexcept { return links_; }
  const std::vector<VnfType>& catalog() const noexcept { return catalog_; }
  double delay_unit_bits() const noexcept { return delay_unit_bits_; }
  double vnf_usage_threshold() const noexcept { return vnf_usage_threshold_; }

  std::size_t endpoint_count() const noexcept { return nodes_.size() + devices_.size(); }
  std::size_t device_endpoint(std::size_t device) const noexcept { return nodes_.size() + device; }

  std::optional<std::size_t> node_index(const std::string& id) const { return find(node_ids_, id); }
  std::optional<std::size_t> device_index(const std::string& id) const {
    return find(device_ids_, id);
  }
  std::optional<std::size_t> type_index(const std::string& id) const { return find(type_ids_, id); }
  std::optional<std::size_t> endpoint_index(const std::string& id) const {
    if (auto n = node_index(id)) return n;
    if (auto d = device_index(id)) return nodes_.size() + *d;
    return std::nullopt;
  }

  /// Link index between two endpoints, or kNoLink.
  int link_index(std::size_t a, std::size_t b) const noexcept {
    return link_matrix_[a * endpoint_count() + b];
  }
  const Link* compute_link(std::size_t node_a, std::size_t node_b) const noexcept {
    const int i = link_index(node_a, node_b);
    return i == kNoLink ? nullptr : &links_[static_cast<std::size_t>(i)];
  }
  const Link* device_link(std::size_t device, std::size_t node) const noexcept {
    const int i = link_index(device_endpoint(device), node);
    return i == kNoLink ? nullptr : &links_[static_cast<std::size_t>(i)];
  }

  /// Same substrate with a different catalog (used to clone VNF types).
  Infrastructure with_catalog(std::vector<VnfType> catalog) const {
    return Infrastructure(nodes_, devices_, links_, std::move(catalog), delay_unit_bits_,
                          vnf_usage_threshold_);
  }

 private:
  static std::optional<std::size_t> find(const std::unordered_map<std::string, std::size_t>& map,
                                         const std::string& id) {
    auto it = map.find(id);
    if (it == map.end()) return std::nullopt;
    return it->second;
  }

  void build_indices() {
    if (!(delay_unit_bits_ > 0.0)) throw InfrastructureError("delay unit must be positive");
    if (!(vnf_usage_threshold_ > 0.0 && vnf_usage_threshold_ <= 1.0)) {
      throw InfrastructureError("VNF usage threshold must lie in (0, 1]");
    }
    std::unordered_map<std::string, int> all_ids;
    const auto claim = [&](const std::string& id, const char* what) {
      if (id.empty()) throw InfrastructureError(std::string("empty ") + what + " id");
      if (!all_ids.emplace(id, 0).second) {
        throw InfrastructureError("duplicate identifier '" + id + "'");
      }
    };
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const auto& n = nodes_[i];
      claim(n.id, "node");
      node_ids_.emplace(n.id, i);
      if (!(n.capacity_vcpu > 0.0)) throw InfrastructureError("node '" + n.id + "': capacity must be positive");
      if (!(n.cost_per_vcpu >= 0.0)) throw InfrastructureError("node '" + n.id + "': negative unit cost");
      if (!(n.usage_threshold > 0.0 && n.usage_threshold <= 1.0)) {
        throw InfrastructureError("node '" + n.id + "': usage threshold must lie in (0, 1]");
      }
    }
    for (std::size_t i = 0; i < devices_.size(); ++i) {
      claim(devices_[i], "device");
      device_ids_.emplace(devices_[i], i);
    }
    for (std::size_t i = 0; i < catalog_.size(); ++i) {
      const auto& t = catalog_[i];
      if (t.id.empty()) throw InfrastructureError("empty VNF type id");
      if (!type_ids_.emplace(t.id, i).second) throw InfrastructureError("duplicate VNF type '" + t.id + "'");
      if (!(t.license_cost >= 0.0)) throw InfrastructureError("VNF type '" + t.id + "': negative license cost");
      if (!(t.capacity_bits > 0.0)) throw InfrastructureError("VNF type '" + t.id + "': capacity must be positive");
      if (!(t.requirement_vcpu > 0.0)) throw InfrastructureError("VNF type '" + t.id + "': requirement must be positive");
      if (t.instance_count < 1) throw InfrastructureError("VNF type '" + t.id + "': needs at least one instance");
      if (!(t.delay_cloud_ms >= 0.0 && t.delay_fog_ms >= 0.0)) {
        throw InfrastructureError("VNF type '" + t.id + "': negative processing delay");
      }
    }

    const std::size_t ne = endpoint_count();
    link_matrix_.assign(ne * ne, kNoLink);
    std::unordered_map<std::string, int> link_ids;
    for (std::size_t i = 0; i < links_.size(); ++i) {
      auto& l = links_[i];
      if (l.id.empty()) l.id = l.a + "_" + l.b;
      if (!link_ids.emplace(l.id, 0).second) throw InfrastructureError("duplicate link id '" + l.id + "'");
      const auto a = endpoint_index(l.a);
      const auto b = endpoint_index(l.b);
      if (!a || !b) {
        throw InfrastructureError("link '" + l.id + "': unknown endpoint '" + (a ? l.b : l.a) + "'");
      }
      if (*a == *b) throw InfrastructureError("link '" + l.id + "': self loop");
      l.cls = classify(*a, *b, l.id);
      if (!(l.bandwidth_bits > 0.0)) throw InfrastructureError("link '" + l.id + "': bandwidth must be positive");
      if (!(l.cost_per_bit >= 0.0)) throw InfrastructureError("link '" + l.id + "': negative cost");
      if (!(l.delay_ms >= 0.0)) throw InfrastructureError("link '" + l.id + "': negative delay");
      if (!(l.usage_threshold > 0.0 && l.usage_threshold <= 1.0)) {
        throw InfrastructureError("link '" + l.id + "': usage threshold must lie in (0, 1]");
      }
      int& ab = link_matrix_[*a * ne + *b];
      if (ab != kNoLink) {
        throw InfrastructureError("link '" + l.id + "' duplicates the link between '" + l.a +
                                  "' and '" + l.b + "'");
      }
      ab = static_cast<int>(i);
      link_matrix_[*b * ne + *a] = static_cast<int>(i);
    }
  }

  LinkClass classify(std::size_t a, std::size_t b, const std::string& id) const {
    const bool a_dev = a >= nodes_.size();
    const bool b_dev = b >= nodes_.size();
    if (a_dev && b_dev) throw InfrastructureError("link '" + id + "' joins two IoT devices");
    if (a_dev || b_dev) {
      const auto node = a_dev ? b : a;
      return nodes_[node].tier == Tier::cloud ? LinkClass::iot_cloud : LinkClass::iot_fog;
    }
    const Tier ta = nodes_[a].tier;
    const Tier tb = nodes_[b].tier;
    if (ta != tb) return LinkClass::cloud_fog;
    return ta == Tier::cloud ? LinkClass::cloud_cloud : LinkClass::fog_fog;
  }

  std::vector<ComputeNode> nodes_;
  std::vector<std::string> devices_;
  std::vector<Link> links_;
  std::vector<VnfType> catalog_;
  double delay_unit_bits_ = 80.0 * kBitsPerKilobyte;
  double vnf_usage_threshold_ = 1.0;

  std::unordered_map<std::string, std::size_t> node_ids_;
  std::unordered_map<std::string, std::size_t> device_ids_;
  std::unordered_map<std::string, std::size_t> type_ids_;
  std::vector<int> link_matrix_;
};

/// The link joining endpoints `a` and `b` (order irrelevant), if any.
inline std::optional<Link> link_between(const Infrastructure& infra, const std::string& a,
                                        const std::string& b) {
  if (a == b) throw std::invalid_argument("link_between: endpoints must differ ('" + a + "')");
  const auto ia = infra.endpoint_index(a);
  const auto ib = infra.endpoint_index(b);
  if (!ia) throw std::out_of_range("unknown endpoint '" + a + "'");
  if (!ib) throw std::out_of_range("unknown endpoint '" + b + "'");
  const int l = infra.link_index(*ia, *ib);
  if (l == Infrastructure::kNoLink) return std::nullopt;
  return infra.links()[static_cast<std::size_t>(l)];
}

/// Every request-level invariant that involves the substrate.
inline ValidationReport validate_scenario(const Infrastructure& infra,
                                          const std::vector<Request>& requests) {
  ValidationReport report;
  std::set<std::string> ids;
  for (const auto& req : requests) {
    if (!ids.insert(req.id).second) report.violations.push_back("duplicate request id '" + req.id + "'");
    auto r = validate_request(req, infra.catalog());
    report.violations.insert(report.violations.end(), r.violations.begin(), r.violations.end());
    for (const auto& d : req.devices) {
      if (!infra.device_index(d)) {
        report.violations.push_back("request '" + req.id + "': unknown IoT device '" + d + "'");
      }
    }
  }
  return report;
}

}  // namespace fogweave
