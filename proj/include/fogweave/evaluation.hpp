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

/// \file evaluation.hpp
///
/// Ground-truth evaluation of a concrete placement: expected cost and
/// expected makespan per request (bottom-up fold over the tree) and a
/// report-style feasibility checker. Every solver result is re-scored here.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fogweave/app_model.hpp"
#include "fogweave/infra_model.hpp"

namespace fogweave {

struct Assignment {
  VnfInstanceRef instance;
  std::size_t node = 0;

  friend auto operator<=>(const Assignment&, const Assignment&) = default;
};

/// A deployed VNF instance and its hosting node.
using Deployment = Assignment;

/// Assignments are indexed by request position, then leaf position.
struct Placement {
  std::vector<std::vector<std::optional<Assignment>>> assignments;
  std::vector<Deployment> deployed;  // sorted, unique

  friend bool operator==(const Placement&, const Placement&) = default;

  static Placement empty_for(const std::vector<Request>& requests) {
    Placement p;
    p.assignments.reserve(requests.size());
    for (const auto& r : requests) p.assignments.emplace_back(r.tree.leaf_count());
    return p;
  }

  void deploy(Deployment d) {
    auto it = std::lower_bound(deployed.begin(), deployed.end(), d);
    if (it == deployed.end() || *it != d) deployed.insert(it, d);
  }

  /// Assigns and deploys.
  void assign(std::size_t request, std::size_t leaf, Assignment a) {
    assignments.at(request).at(leaf) = a;
    deploy(a);
  }

  const std::optional<Assignment>& at(std::size_t request, std::size_t leaf) const {
    return assignments.at(request).at(leaf);
  }
};

class IncompletePlacementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InfeasibleRouteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CostBreakdown {
  double processing = 0.0;
  double deployment = 0.0;
  double communication = 0.0;
  double total = 0.0;
};

struct MakespanBreakdown {
  double processing = 0.0;
  double communication = 0.0;
  double total = 0.0;
};

/// Request data resolved against an infrastructure.
struct RequestProfile {
  std::vector<LeafAnnotation> leaves;
  std::vector<std::size_t> leaf_type;  // catalog index per leaf
  std::vector<std::size_t> devices;    // device index
  double traffic_bits = 0.0;
  double delay_units = 0.0;  // traffic measured in delay units

  static RequestProfile of(const Request& req, const Infrastructure& infra) {
    RequestProfile p;
    p.leaves = annotate_leaves(req.tree);
    for (const auto& leaf : p.leaves) {
      auto t = infra.type_index(leaf.type_id);
      if (!t) throw std::invalid_argument("request '" + req.id + "': unknown VNF type '" + leaf.type_id + "'");
      p.leaf_type.push_back(*t);
    }
    for (const auto& d : req.devices) {
      auto i = infra.device_index(d);
      if (!i) throw std::invalid_argument("request '" + req.id + "': unknown device '" + d + "'");
      p.devices.push_back(*i);
    }
    p.traffic_bits = req.traffic_bits;
    p.delay_units = req.traffic_bits / infra.delay_unit_bits();
    return p;
  }
};

namespace detail {

inline const Assignment& slot(const std::vector<std::optional<Assignment>>& slots, std::size_t leaf,
                              const Request& req) {
  if (leaf >= slots.size() || !slots[leaf]) {
    throw IncompletePlacementError("request '" + req.id + "': leaf " + std::to_string(leaf) +
                                   " is not assigned");
  }
  return *slots[leaf];
}

inline const Link& route(const Infrastructure& infra, std::size_t a, std::size_t b,
                         const Request& req) {
  const Link* link = infra.compute_link(a, b);
  if (link == nullptr) {
    throw InfeasibleRouteError("request '" + req.id + "': no link between '" +
                               infra.nodes()[a].id + "' and '" + infra.nodes()[b].id + "'");
  }
  return *link;
}

inline const Link& device_route(const Infrastructure& infra, std::size_t device, std::size_t node,
                                const Request& req) {
  const Link* link = infra.device_link(device, node);
  if (link == nullptr) {
    throw InfeasibleRouteError("request '" + req.id + "': no link between device '" +
                               infra.devices()[device] + "' and '" + infra.nodes()[node].id + "'");
  }
  return *link;
}

inline double processing_delay(const VnfType& type, const ComputeNode& node) {
  return node.tier == Tier::cloud ? type.delay_cloud_ms : type.delay_fog_ms;
}

struct MakespanFold {
  const std::vector<std::optional<Assignment>>& slots;
  const Request& req;
  const RequestProfile& profile;
  const Infrastructure& infra;
  std::size_t next_leaf = 0;

  MakespanBreakdown fold(const TreeNode& node) {
    MakespanBreakdown out;
    switch (node.kind) {
      case NodeKind::leaf: {
        const std::size_t leaf = next_leaf++;
        const Assignment& a = slot(slots, leaf, req);
        const auto& type = infra.catalog()[profile.leaf_type[leaf]];
        out.processing = profile.delay_units * processing_delay(type, infra.nodes()[a.node]);
        if (auto pred = profile.leaves[leaf].predecessor) {
          const Assignment& b = slot(slots, *pred, req);
          if (a.node != b.node) {
            out.communication = profile.delay_units * route(infra, a.node, b.node, req).delay_ms;
          }
        }
        break;
      }
      case NodeKind::seq:
        for (const auto& c : node.children) {
          auto m = fold(c);
          out.processing += m.processing;
          out.communication += m.communication;
        }
        break;
      case NodeKind::par:
        // Each metric takes its own maximum over the branches.
        for (const auto& c : node.children) {
          auto m = fold(c);
          out.processing = std::max(out.processing, m.processing);
          out.communication = std::max(out.communication, m.communication);
        }
        break;
      case NodeKind::sel:
        for (std::size_t i = 0; i < node.children.size(); ++i) {
          auto m = fold(node.children[i]);
          out.processing += node.probabilities[i] * m.processing;
          out.communication += node.probabilities[i] * m.communication;
        }
        break;
      case NodeKind::loop: {
        MakespanBreakdown body;
        for (const auto& c : node.children) {
          auto m = fold(c);
          body.processing += m.processing;
          body.communication += m.communication;
        }
        const double it = expected_iterations(node.continuation);
        out.processing = it * body.processing;
        out.communication = it * body.communication;
        break;
      }
    }
    return out;
  }
};

}  // namespace detail

/// Expected cost of request `r` under `placement`. Processing and
/// communication terms carry the leaf weights; licenses are charged once per
/// VNF the request uses, independent of the execution path.
inline CostBreakdown cost_of(const Placement& placement, std::size_t r, const Request& req,
                             const Infrastructure& infra, const RequestProfile& profile) {
  const auto& slots = placement.assignments.at(r);
  CostBreakdown c;
  for (std::size_t leaf = 0; leaf < profile.leaves.size(); ++leaf) {
    const auto& ann = profile.leaves[leaf];
    const Assignment& a = detail::slot(slots, leaf, req);
    const auto& type = infra.catalog()[profile.leaf_type[leaf]];
    const auto& node = infra.nodes()[a.node];
    c.processing += ann.node_weight * node.cost_per_vcpu * type.requirement_vcpu;
    c.deployment += type.license_cost;
    if (ann.predecessor) {
      const Assignment& b = detail::slot(slots, *ann.predecessor, req);
      if (a.node != b.node) {
        c.communication += ann.edge_weight * profile.traffic_bits *
                           detail::route(infra, a.node, b.node, req).cost_per_bit;
      }
    }
  }
  const Assignment& first = detail::slot(slots, Request::first_vnf(), req);
  for (std::size_t d : profile.devices) {
    c.communication +=
        profile.traffic_bits * detail::device_route(infra, d, first.node, req).cost_per_bit;
  }
  c.total = c.processing + c.deployment + c.communication;
  return c;
}

inline CostBreakdown cost_of(const Placement& placement, std::size_t r, const Request& req,
                             const Infrastructure& infra) {
  return cost_of(placement, r, req, infra, RequestProfile::of(req, infra));
}

/// Expected makespan of request `r`: seq sums, par takes the maximum of
/// each metric, sel weights by probability, loop scales its body by the
/// expected iteration count. The device link delay is added once.
inline MakespanBreakdown makespan_of(const Placement& placement, std::size_t r, const Request& req,
                                     const Infrastructure& infra, const RequestProfile& profile) {
  const auto& slots = placement.assignments.at(r);
  detail::MakespanFold folder{slots, req, profile, infra};
  MakespanBreakdown m = folder.fold(req.tree.root);
  const Assignment& first = detail::slot(slots, Request::first_vnf(), req);
  for (std::size_t d : profile.devices) {
    m.communication +=
        profile.delay_units * detail::device_route(infra, d, first.node, req).delay_ms;
  }
  m.total = m.processing + m.communication;
  return m;
}

inline MakespanBreakdown makespan_of(const Placement& placement, std::size_t r, const Request& req,
                                     const Infrastructure& infra) {
  return makespan_of(placement, r, req, infra, RequestProfile::of(req, infra));
}

/// System-wide view of a placement.
struct PlacementEvaluation {
  std::vector<CostBreakdown> costs;
  std::vector<MakespanBreakdown> makespans;
  double cost_total = 0.0;      // sum of per-request costs
  double makespan_total = 0.0;  // sum of per-request makespans
  double objective = 0.0;       // alpha * cost_total + (1 - alpha) * makespan_total
  double license_deduplicated = 0.0;     // each used instance's license once
  double cost_total_deduplicated = 0.0;  // variable costs + deduplicated licenses
};

inline double weighted_objective(double alpha, double cost, double makespan) {
  return alpha * cost + (1.0 - alpha) * makespan;
}

inline PlacementEvaluation evaluate(const Placement& placement, const std::vector<Request>& requests,
                                    const Infrastructure& infra, double alpha,
                                    const std::vector<RequestProfile>& profiles) {
  PlacementEvaluation e;
  std::set<VnfInstanceRef> used;
  double variable = 0.0;
  for (std::size_t r = 0; r < requests.size(); ++r) {
    e.costs.push_back(cost_of(placement, r, requests[r], infra, profiles[r]));
    e.makespans.push_back(makespan_of(placement, r, requests[r], infra, profiles[r]));
    e.cost_total += e.costs.back().total;
    e.makespan_total += e.makespans.back().total;
    variable += e.costs.back().processing + e.costs.back().communication;
    for (const auto& a : placement.assignments[r]) used.insert(a->instance);
  }
  for (const auto& inst : used) e.license_deduplicated += infra.catalog()[inst.type].license_cost;
  e.cost_total_deduplicated = variable + e.license_deduplicated;
  e.objective = weighted_objective(alpha, e.cost_total, e.makespan_total);
  return e;
}

inline std::vector<RequestProfile> profiles_of(const std::vector<Request>& requests,
                                               const Infrastructure& infra) {
  std::vector<RequestProfile> out;
  out.reserve(requests.size());
  for (const auto& r : requests) out.push_back(RequestProfile::of(r, infra));
  return out;
}

inline PlacementEvaluation evaluate(const Placement& placement, const std::vector<Request>& requests,
                                    const Infrastructure& infra, double alpha) {
  return evaluate(placement, requests, infra, alpha, profiles_of(requests, infra));
}

/// alpha-weighted objective without the system-wide breakdown.
inline double objective_of(const Placement& placement, const std::vector<Request>& requests,
                           const Infrastructure& infra, double alpha,
                           const std::vector<RequestProfile>& profiles) {
  double cost = 0.0;
  double makespan = 0.0;
  for (std::size_t r = 0; r < requests.size(); ++r) {
    cost += cost_of(placement, r, requests[r], infra, profiles[r]).total;
    makespan += makespan_of(placement, r, requests[r], infra, profiles[r]).total;
  }
  return weighted_objective(alpha, cost, makespan);
}

/// One violated constraint. `slack` is capacity minus load (negative when
/// overloaded), or -1 for structural violations.
struct Violation {
  std::string constraint;
  std::string subject;
  double slack = -1.0;

  std::string message() const {
    std::ostringstream os;
    os << constraint << " [" << subject << "] slack " << slack;
    return os.str();
  }
};

/// Lists every violated placement constraint: one assignment per leaf,
/// assignments deployed, single host per instance, routes exist, node,
/// link, device-link and instance capacities, type coverage.
inline std::vector<Violation> check_feasibility(const Placement& placement,
                                                const std::vector<Request>& requests,
                                                const Infrastructure& infra,
                                                const std::vector<RequestProfile>& profiles) {
  std::vector<Violation> out;
  const auto& nodes = infra.nodes();
  const auto& catalog = infra.catalog();
  std::vector<std::size_t> offset(catalog.size() + 1, 0);
  for (std::size_t t = 0; t < catalog.size(); ++t) {
    offset[t + 1] = offset[t] + static_cast<std::size_t>(catalog[t].instance_count);
  }
  const auto valid = [&](const Assignment& a) {
    return a.node < nodes.size() && a.instance.type < catalog.size() && a.instance.index >= 0 &&
           a.instance.index < catalog[a.instance.type].instance_count;
  };
  const auto flat = [&](const VnfInstanceRef& i) {
    return offset[i.type] + static_cast<std::size_t>(i.index);
  };
  const auto name = [&](const VnfInstanceRef& i) {
    return (i.type < catalog.size() ? catalog[i.type].id : "?") + "#" + std::to_string(i.index);
  };

  // Deployments.
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> host(offset.back(), kNone);
  std::vector<double> node_load(nodes.size(), 0.0);
  std::vector<char> covered(catalog.size(), 0);
  for (const auto& d : placement.deployed) {
    if (!valid(d)) {
      out.push_back({"deployment-reference", name(d.instance), -1.0});
      continue;
    }
    std::size_t& h = host[flat(d.instance)];
    if (h != kNone && h != d.node) {
      out.push_back({"instance-single-host",
                     name(d.instance) + "@" + nodes[h].id + "," + nodes[d.node].id, -1.0});
    }
    h = d.node;
    covered[d.instance.type] = 1;
    node_load[d.node] += catalog[d.instance.type].requirement_vcpu;
  }
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    const double slack = nodes[n].usable_vcpu() - node_load[n];
    if (slack < -1e-9) out.push_back({"node-capacity", nodes[n].id, slack});
  }

  // Assignments, routes and traffic.
  std::vector<double> instance_load(offset.back() * nodes.size(), 0.0);
  std::vector<double> link_load(infra.links().size(), 0.0);
  std::vector<char> required(catalog.size(), 0);
  for (std::size_t r = 0; r < requests.size(); ++r) {
    const auto& req = requests[r];
    const auto& profile = profiles[r];
    const auto* slots = r < placement.assignments.size() ? &placement.assignments[r] : nullptr;
    const auto get = [&](std::size_t leaf) -> const Assignment* {
      if (slots == nullptr || leaf >= slots->size() || !(*slots)[leaf]) return nullptr;
      const Assignment& a = *(*slots)[leaf];
      return valid(a) ? &a : nullptr;
    };
    for (std::size_t leaf = 0; leaf < profile.leaves.size(); ++leaf) {
      const std::size_t type = profile.leaf_type[leaf];
      required[type] = 1;
      if (slots == nullptr || leaf >= slots->size() || !(*slots)[leaf]) {
        out.push_back({"assignment", req.id + "/" + std::to_string(leaf), -1.0});
        continue;
      }
      const Assignment& a = *(*slots)[leaf];
      if (!valid(a)) {
        out.push_back({"assignment-reference", req.id + "/" + std::to_string(leaf), -1.0});
        continue;
      }
      if (a.instance.type != type) {
        out.push_back({"assignment-type", req.id + "/" + std::to_string(leaf) + ":" + name(a.instance), -1.0});
      }
      if (!std::binary_search(placement.deployed.begin(), placement.deployed.end(), a)) {
        out.push_back({"assignment-deployed",
                       req.id + "/" + std::to_string(leaf) + ":" + name(a.instance) + "@" + nodes[a.node].id,
                       -1.0});
      }
      instance_load[flat(a.instance) * nodes.size() + a.node] += req.traffic_bits;
      if (auto pred = profile.leaves[leaf].predecessor) {
        if (const Assignment* b = get(*pred); b != nullptr && b->node != a.node) {
          const int l = infra.link_index(a.node, b->node);
          if (l == Infrastructure::kNoLink) {
            out.push_back({"route", req.id + "/" + std::to_string(leaf) + ":" + nodes[b->node].id + "-" +
                                        nodes[a.node].id,
                           -1.0});
          } else {
            link_load[static_cast<std::size_t>(l)] += req.traffic_bits;
          }
        }
      }
    }
    if (const Assignment* first = get(Request::first_vnf())) {
      for (std::size_t d : profile.devices) {
        const int l = infra.link_index(infra.device_endpoint(d), first->node);
        if (l == Infrastructure::kNoLink) {
          out.push_back({"device-route", req.id + ":" + infra.devices()[d] + "-" + nodes[first->node].id, -1.0});
        } else {
          link_load[static_cast<std::size_t>(l)] += req.traffic_bits;
        }
      }
    }
  }
  for (std::size_t l = 0; l < link_load.size(); ++l) {
    const auto& link = infra.links()[l];
    const double slack = link.usable_bits() - link_load[l];
    if (slack < -1e-9 * link.bandwidth_bits) out.push_back({"link-capacity", link.id, slack});
  }
  for (std::size_t t = 0; t < catalog.size(); ++t) {
    const double cap = infra.vnf_usage_threshold() * catalog[t].capacity_bits;
    for (int i = 0; i < catalog[t].instance_count; ++i) {
      for (std::size_t n = 0; n < nodes.size(); ++n) {
        const double slack = cap - instance_load[flat({t, i}) * nodes.size() + n];
        if (slack < -1e-9 * cap) {
          out.push_back({"instance-capacity", name({t, i}) + "@" + nodes[n].id, slack});
        }
      }
    }
  }
  for (std::size_t t = 0; t < catalog.size(); ++t) {
    if (required[t] && !covered[t]) out.push_back({"coverage", catalog[t].id, -1.0});
  }
  return out;
}

inline std::vector<Violation> check_feasibility(const Placement& placement,
                                                const std::vector<Request>& requests,
                                                const Infrastructure& infra) {
  return check_feasibility(placement, requests, infra, profiles_of(requests, infra));
}

}  // namespace fogweave
