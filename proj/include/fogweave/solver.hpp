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

/// \file solver.hpp
///
/// Exact placement by depth-first branch and bound over per-(request, leaf)
/// decisions, an exhaustive enumeration oracle that shares no search code
/// with it, and a rejection-sampling random baseline.
///
/// Decisions are taken request by request, leaves in execution order, so a
/// leaf's predecessor is always placed before the leaf itself. Instances of
/// a type are interchangeable: a leaf may join an instance already deployed
/// on the node or open the lowest-indexed undeployed one, which removes the
/// instance-relabelling symmetry without losing any objective value.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fogweave/app_model.hpp"
#include "fogweave/evaluation.hpp"
#include "fogweave/infra_model.hpp"
#include "fogweave/parallel.hpp"
#include "fogweave/rng.hpp"

namespace fogweave {

enum class SolveStatus { optimal, feasible, infeasible, budget_exhausted };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::feasible: return "feasible";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::budget_exhausted: return "budget_exhausted";
  }
  return "?";
}

enum class TierFilter { hybrid, cloud_only, fog_only };

inline const char* to_string(TierFilter t) {
  switch (t) {
    case TierFilter::hybrid: return "hybrid";
    case TierFilter::cloud_only: return "cloud";
    case TierFilter::fog_only: return "fog";
  }
  return "?";
}

inline bool admits(TierFilter filter, Tier tier) {
  return filter == TierFilter::hybrid || (filter == TierFilter::cloud_only) == (tier == Tier::cloud);
}

/// One explored search node. `prefix` holds the decisions taken so far in
/// search order (see decision_order()).
struct TraceRecord {
  std::size_t task = 0;
  std::size_t depth = 0;
  double bound = 0.0;
  double incumbent = std::numeric_limits<double>::infinity();
  std::vector<Assignment> prefix;
};

struct SolveOptions {
  std::uint64_t node_budget = 200'000'000;
  TierFilter tier = TierFilter::hybrid;
  /// 0 picks the hardware concurrency; FOGWEAVE_THREADS caps either.
  unsigned threads = 0;
  /// Called once per explored node, in deterministic order.
  std::function<void(const TraceRecord&)> trace;
};

struct SolveResult {
  SolveStatus status = SolveStatus::infeasible;
  Placement placement;
  double objective = std::numeric_limits<double>::infinity();
  double cost_total = 0.0;
  double makespan_total = 0.0;
  std::uint64_t nodes_explored = 0;
  PlacementEvaluation evaluation;

  bool has_placement() const noexcept {
    return status == SolveStatus::optimal || status == SolveStatus::feasible ||
           (status == SolveStatus::budget_exhausted && objective < std::numeric_limits<double>::infinity());
  }
};

/// (request, leaf) pairs in the order the exact solver decides them.
inline std::vector<std::pair<std::size_t, std::size_t>> decision_order(
    const std::vector<Request>& requests) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t r = 0; r < requests.size(); ++r) {
    const std::size_t n = requests[r].tree.leaf_count();
    for (std::size_t l = 0; l < n; ++l) out.emplace_back(r, l);
  }
  return out;
}

namespace detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kLoadEps = 1e-9;

inline void finish(SolveResult& result, const std::vector<Request>& requests,
                   const Infrastructure& infra, double alpha) {
  if (!result.has_placement()) return;
  result.evaluation = evaluate(result.placement, requests, infra, alpha);
  result.objective = result.evaluation.objective;
  result.cost_total = result.evaluation.cost_total;
  result.makespan_total = result.evaluation.makespan_total;
}

inline void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
}

/// Makespan fold compiled to flat arrays for repeated bound evaluation.
struct FoldNode {
  NodeKind kind = NodeKind::leaf;
  std::vector<std::size_t> children;
  std::vector<double> factor;  // per child: sel probability, else 1
  double scale = 1.0;          // loop: expected iterations
  std::size_t decision = 0;    // leaf
};

struct Decision {
  std::size_t request = 0;
  std::size_t leaf = 0;
  std::size_t type = 0;
  double weight = 1.0;
  std::ptrdiff_t pred = -1;  // decision index
  bool first = false;
};

class SearchProblem {
 public:
  SearchProblem(const Infrastructure& infra, const std::vector<Request>& requests, double alpha,
                TierFilter tier)
      : infra_(infra), requests_(requests), alpha_(alpha), profiles_(profiles_of(requests, infra)) {
    const auto& nodes = infra.nodes();
    const auto& catalog = infra.catalog();
    node_count_ = nodes.size();

    // Preferred tier first, then by id.
    const Tier preferred = (1.0 - alpha) > alpha ? Tier::fog : Tier::cloud;
    for (std::size_t n = 0; n < nodes.size(); ++n) {
      if (admits(tier, nodes[n].tier)) candidates_.push_back(n);
    }
    std::sort(candidates_.begin(), candidates_.end(), [&](std::size_t a, std::size_t b) {
      const bool pa = nodes[a].tier == preferred;
      const bool pb = nodes[b].tier == preferred;
      if (pa != pb) return pa;
      return nodes[a].id < nodes[b].id;
    });

    inst_offset_.assign(catalog.size() + 1, 0);
    for (std::size_t t = 0; t < catalog.size(); ++t) {
      inst_offset_[t + 1] = inst_offset_[t] + static_cast<std::size_t>(catalog[t].instance_count);
    }

    for (std::size_t r = 0; r < requests.size(); ++r) {
      const auto& prof = profiles_[r];
      const std::size_t base = decisions_.size();
      request_base_.push_back(base);
      for (std::size_t l = 0; l < prof.leaves.size(); ++l) {
        Decision d;
        d.request = r;
        d.leaf = l;
        d.type = prof.leaf_type[l];
        d.weight = prof.leaves[l].node_weight;
        if (auto p = prof.leaves[l].predecessor) d.pred = static_cast<std::ptrdiff_t>(base + *p);
        d.first = l == Request::first_vnf();
        decisions_.push_back(d);
      }
      // Device terms of the first VNF, per node.
      std::vector<double> dcost(node_count_, 0.0);
      std::vector<double> dtime(node_count_, 0.0);
      for (std::size_t n = 0; n < node_count_; ++n) {
        for (std::size_t dev : prof.devices) {
          const Link* link = infra.device_link(dev, n);
          if (link == nullptr) {
            dcost[n] = dtime[n] = kInf;
            break;
          }
          dcost[n] += prof.traffic_bits * link->cost_per_bit;
          dtime[n] += prof.delay_units * link->delay_ms;
        }
      }
      device_cost_.push_back(std::move(dcost));
      device_time_.push_back(std::move(dtime));
      folds_.emplace_back();
      roots_.push_back(compile(requests[r].tree.root, folds_.back(), base));
    }

    static_cost_.assign(decisions_.size() * node_count_, 0.0);
    proc_time_.assign(decisions_.size() * node_count_, 0.0);
    for (std::size_t d = 0; d < decisions_.size(); ++d) {
      const auto& dec = decisions_[d];
      const auto& type = catalog[dec.type];
      for (std::size_t n = 0; n < node_count_; ++n) {
        static_cost_[d * node_count_ + n] =
            dec.weight * nodes[n].cost_per_vcpu * type.requirement_vcpu + type.license_cost;
        proc_time_[d * node_count_ + n] =
            profiles_[dec.request].delay_units * processing_delay(type, nodes[n]);
      }
    }
  }

  const Infrastructure& infra() const { return infra_; }
  const std::vector<Request>& requests() const { return requests_; }
  const std::vector<RequestProfile>& profiles() const { return profiles_; }
  double alpha() const { return alpha_; }
  const std::vector<Decision>& decisions() const { return decisions_; }
  const std::vector<std::size_t>& candidates() const { return candidates_; }
  std::size_t node_count() const { return node_count_; }
  std::size_t instance_slots() const { return inst_offset_.back(); }
  std::size_t flat(std::size_t type, int index) const {
    return inst_offset_[type] + static_cast<std::size_t>(index);
  }
  double static_cost(std::size_t d, std::size_t n) const { return static_cost_[d * node_count_ + n]; }
  double proc_time(std::size_t d, std::size_t n) const { return proc_time_[d * node_count_ + n]; }
  double device_cost(std::size_t r, std::size_t n) const { return device_cost_[r][n]; }
  double device_time(std::size_t r, std::size_t n) const { return device_time_[r][n]; }

  /// Folds per-leaf processing/communication values of request r.
  std::pair<double, double> fold(std::size_t r, const std::vector<double>& proc,
                                 const std::vector<double>& com) const {
    return fold_node(folds_[r], roots_[r], proc, com);
  }

 private:
  static std::size_t compile(const TreeNode& node, std::vector<FoldNode>& out, std::size_t base) {
    std::size_t leaf = base;
    return compile_rec(node, out, leaf);
  }

  static std::size_t compile_rec(const TreeNode& node, std::vector<FoldNode>& out,
                                 std::size_t& next_leaf) {
    FoldNode f;
    f.kind = node.kind;
    if (node.kind == NodeKind::leaf) {
      f.decision = next_leaf++;
    } else {
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        f.children.push_back(compile_rec(node.children[i], out, next_leaf));
        f.factor.push_back(node.kind == NodeKind::sel ? node.probabilities[i] : 1.0);
      }
      if (node.kind == NodeKind::loop) f.scale = expected_iterations(node.continuation);
    }
    out.push_back(std::move(f));
    return out.size() - 1;
  }

  static std::pair<double, double> fold_node(const std::vector<FoldNode>& nodes, std::size_t i,
                                             const std::vector<double>& proc,
                                             const std::vector<double>& com) {
    const FoldNode& f = nodes[i];
    if (f.kind == NodeKind::leaf) return {proc[f.decision], com[f.decision]};
    double p = 0.0;
    double c = 0.0;
    for (std::size_t k = 0; k < f.children.size(); ++k) {
      const auto [cp, cc] = fold_node(nodes, f.children[k], proc, com);
      if (f.kind == NodeKind::par) {
        p = std::max(p, cp);
        c = std::max(c, cc);
      } else {
        p += f.factor[k] * cp;
        c += f.factor[k] * cc;
      }
    }
    return {f.scale * p, f.scale * c};
  }

  const Infrastructure& infra_;
  const std::vector<Request>& requests_;
  double alpha_;
  std::vector<RequestProfile> profiles_;
  std::size_t node_count_ = 0;
  std::vector<std::size_t> candidates_;
  std::vector<std::size_t> inst_offset_;
  std::vector<Decision> decisions_;
  std::vector<std::size_t> request_base_;
  std::vector<std::vector<double>> device_cost_;
  std::vector<std::vector<double>> device_time_;
  std::vector<std::vector<FoldNode>> folds_;
  std::vector<std::size_t> roots_;
  std::vector<double> static_cost_;
  std::vector<double> proc_time_;
};

/// Mutable search state with exact undo.
class SearchState {
 public:
  explicit SearchState(const SearchProblem& problem)
      : p_(problem),
        node_(problem.decisions().size(), -1),
        inst_(problem.decisions().size(), -1),
        host_(problem.instance_slots(), -1),
        users_(problem.instance_slots(), 0),
        node_used_(problem.node_count(), 0.0),
        inst_load_(problem.instance_slots(), 0.0),
        link_load_(problem.infra().links().size(), 0.0),
        proc_(problem.decisions().size(), 0.0),
        com_(problem.decisions().size(), 0.0) {}

  std::size_t depth() const { return frames_.size(); }
  int node_of(std::size_t d) const { return node_[d]; }
  int instance_of(std::size_t d) const { return inst_[d]; }
  double cost() const { return cost_; }

  /// Instances of the decision's type hosted on `n` (ascending), then the
  /// lowest undeployed instance if any.
  void candidate_instances(std::size_t d, std::size_t n, std::vector<int>& out) const {
    out.clear();
    const std::size_t t = p_.decisions()[d].type;
    const int count = p_.infra().catalog()[t].instance_count;
    int fresh = -1;
    for (int i = 0; i < count; ++i) {
      const int h = host_[p_.flat(t, i)];
      if (h == static_cast<int>(n)) out.push_back(i);
      if (h < 0 && fresh < 0) fresh = i;
    }
    if (fresh >= 0) out.push_back(fresh);
  }

  /// Takes decision `depth()` as (instance, n) if every capacity and route
  /// allows it.
  bool try_assign(int instance, std::size_t n) {
    const std::size_t d = depth();
    const auto& dec = p_.decisions()[d];
    const auto& infra = p_.infra();
    const auto& type = infra.catalog()[dec.type];
    const auto& prof = p_.profiles()[dec.request];
    const std::size_t slot = p_.flat(dec.type, instance);

    Frame f;
    f.cost = cost_;
    f.node_used = node_used_[n];
    f.inst_load = inst_load_[slot];

    const bool fresh = host_[slot] < 0;
    if (!fresh && host_[slot] != static_cast<int>(n)) return false;
    if (fresh && node_used_[n] + type.requirement_vcpu > infra.nodes()[n].usable_vcpu() + kLoadEps) {
      return false;
    }
    const double inst_cap = infra.vnf_usage_threshold() * type.capacity_bits;
    if (inst_load_[slot] + prof.traffic_bits > inst_cap * (1.0 + kLoadEps)) return false;

    double edge_cost = 0.0;
    double edge_time = 0.0;
    if (dec.pred >= 0) {
      const int pn = node_[static_cast<std::size_t>(dec.pred)];
      if (pn != static_cast<int>(n)) {
        const int l = infra.link_index(n, static_cast<std::size_t>(pn));
        if (l == Infrastructure::kNoLink) return false;
        const auto& link = infra.links()[static_cast<std::size_t>(l)];
        if (link_load_[static_cast<std::size_t>(l)] + prof.traffic_bits >
            link.usable_bits() * (1.0 + kLoadEps)) {
          return false;
        }
        f.link = l;
        f.link_load = link_load_[static_cast<std::size_t>(l)];
        edge_cost = dec.weight * prof.traffic_bits * link.cost_per_bit;
        edge_time = prof.delay_units * link.delay_ms;
      }
    }
    if (dec.first) {
      for (std::size_t dev : prof.devices) {
        const int l = infra.link_index(infra.device_endpoint(dev), n);
        if (l == Infrastructure::kNoLink) return false;
        const auto& link = infra.links()[static_cast<std::size_t>(l)];
        // Devices of one request are distinct, so each link is charged once here.
        if (link_load_[static_cast<std::size_t>(l)] + prof.traffic_bits >
            link.usable_bits() * (1.0 + kLoadEps)) {
          return false;
        }
      }
      for (std::size_t dev : prof.devices) {
        const auto l = static_cast<std::size_t>(infra.link_index(infra.device_endpoint(dev), n));
        f.device_links.emplace_back(static_cast<int>(l), link_load_[l]);
        link_load_[l] += prof.traffic_bits;
      }
    }

    if (f.link >= 0) link_load_[static_cast<std::size_t>(f.link)] += prof.traffic_bits;
    if (fresh) {
      host_[slot] = static_cast<int>(n);
      node_used_[n] += type.requirement_vcpu;
    }
    ++users_[slot];
    inst_load_[slot] += prof.traffic_bits;
    node_[d] = static_cast<int>(n);
    inst_[d] = instance;
    cost_ += p_.static_cost(d, n) + edge_cost + (dec.first ? p_.device_cost(dec.request, n) : 0.0);
    proc_[d] = p_.proc_time(d, n);
    com_[d] = edge_time;
    frames_.push_back(std::move(f));
    return true;
  }

  void undo() {
    const std::size_t d = depth() - 1;
    Frame& f = frames_.back();
    const auto& dec = p_.decisions()[d];
    const std::size_t n = static_cast<std::size_t>(node_[d]);
    const std::size_t slot = p_.flat(dec.type, inst_[d]);
    if (--users_[slot] == 0) host_[slot] = -1;
    node_used_[n] = f.node_used;
    inst_load_[slot] = f.inst_load;
    if (f.link >= 0) link_load_[static_cast<std::size_t>(f.link)] = f.link_load;
    for (auto it = f.device_links.rbegin(); it != f.device_links.rend(); ++it) {
      link_load_[static_cast<std::size_t>(it->first)] = it->second;
    }
    cost_ = f.cost;
    node_[d] = -1;
    inst_[d] = -1;
    frames_.pop_back();
  }

  /// Admissible lower bound on the objective of every completion; infinity
  /// when some remaining decision has no node left.
  double lower_bound(std::vector<double>& proc, std::vector<double>& com) const {
    const auto& decisions = p_.decisions();
    const auto& infra = p_.infra();
    const std::size_t k = depth();
    proc.assign(proc_.begin(), proc_.end());
    com.assign(com_.begin(), com_.end());
    double cost = cost_;
    std::vector<double> device(p_.requests().size(), 0.0);

    for (std::size_t d = 0; d < decisions.size(); ++d) {
      const auto& dec = decisions[d];
      if (d < k) {
        if (dec.first) device[dec.request] = p_.device_time(dec.request, static_cast<std::size_t>(node_[d]));
        continue;
      }
      const auto& type = infra.catalog()[dec.type];
      const auto& prof = p_.profiles()[dec.request];
      const double inst_cap = infra.vnf_usage_threshold() * type.capacity_bits;
      const int pn = dec.pred >= 0 && static_cast<std::size_t>(dec.pred) < k
                         ? node_[static_cast<std::size_t>(dec.pred)]
                         : -1;
      bool has_fresh = false;
      for (int i = 0; i < type.instance_count && !has_fresh; ++i) has_fresh = host_[p_.flat(dec.type, i)] < 0;

      double best_cost = kInf;
      double best_proc = kInf;
      double best_com = kInf;
      double best_dev = kInf;
      for (std::size_t n : p_.candidates()) {
        bool room = has_fresh &&
                    node_used_[n] + type.requirement_vcpu <= infra.nodes()[n].usable_vcpu() + kLoadEps;
        for (int i = 0; i < type.instance_count && !room; ++i) {
          const std::size_t slot = p_.flat(dec.type, i);
          room = host_[slot] == static_cast<int>(n) &&
                 inst_load_[slot] + prof.traffic_bits <= inst_cap * (1.0 + kLoadEps);
        }
        if (!room) continue;
        double c = p_.static_cost(d, n);
        double t = 0.0;
        if (pn >= 0 && pn != static_cast<int>(n)) {
          const Link* link = infra.compute_link(n, static_cast<std::size_t>(pn));
          if (link == nullptr) continue;
          c += dec.weight * prof.traffic_bits * link->cost_per_bit;
          t = prof.delay_units * link->delay_ms;
        }
        double dv = 0.0;
        if (dec.first) {
          if (p_.device_cost(dec.request, n) == kInf) continue;
          c += p_.device_cost(dec.request, n);
          dv = p_.device_time(dec.request, n);
        }
        best_cost = std::min(best_cost, c);
        best_proc = std::min(best_proc, p_.proc_time(d, n));
        best_com = std::min(best_com, t);
        best_dev = std::min(best_dev, dv);
      }
      if (best_cost == kInf) return kInf;
      cost += best_cost;
      proc[d] = best_proc;
      com[d] = best_com;
      if (dec.first) device[dec.request] = best_dev;
    }

    double makespan = 0.0;
    for (std::size_t r = 0; r < p_.requests().size(); ++r) {
      const auto [fp, fc] = p_.fold(r, proc, com);
      makespan += fp + fc + device[r];
    }
    return weighted_objective(p_.alpha(), cost, makespan);
  }

  std::vector<Assignment> prefix() const {
    std::vector<Assignment> out;
    for (std::size_t d = 0; d < depth(); ++d) {
      out.push_back({{p_.decisions()[d].type, inst_[d]}, static_cast<std::size_t>(node_[d])});
    }
    return out;
  }

  Placement to_placement() const {
    Placement pl = Placement::empty_for(p_.requests());
    for (std::size_t d = 0; d < depth(); ++d) {
      const auto& dec = p_.decisions()[d];
      pl.assign(dec.request, dec.leaf, {{dec.type, inst_[d]}, static_cast<std::size_t>(node_[d])});
    }
    return pl;
  }

 private:
  struct Frame {
    double cost = 0.0;
    double node_used = 0.0;
    double inst_load = 0.0;
    int link = -1;
    double link_load = 0.0;
    std::vector<std::pair<int, double>> device_links;
  };

  const SearchProblem& p_;
  std::vector<int> node_;
  std::vector<int> inst_;
  std::vector<int> host_;
  std::vector<int> users_;
  std::vector<double> node_used_;
  std::vector<double> inst_load_;
  std::vector<double> link_load_;
  std::vector<double> proc_;
  std::vector<double> com_;
  double cost_ = 0.0;
  std::vector<Frame> frames_;
};

struct TaskResult {
  double best = kInf;
  std::optional<Placement> placement;
  std::uint64_t nodes = 0;
  bool exhausted = false;
  std::vector<TraceRecord> trace;
};

class BranchAndBound {
 public:
  BranchAndBound(const SearchProblem& problem, std::size_t task, double incumbent,
                 std::uint64_t budget, bool tracing)
      : p_(problem), state_(problem), task_(task), budget_(budget), tracing_(tracing) {
    result_.best = incumbent;
  }

  SearchState& state() { return state_; }

  TaskResult run() {
    dfs();
    return std::move(result_);
  }

 private:
  void dfs() {
    if (result_.exhausted) return;
    if (++result_.nodes > budget_) {
      result_.exhausted = true;
      return;
    }
    const std::size_t depth = state_.depth();
    const double bound = state_.lower_bound(proc_, com_);
    if (tracing_) result_.trace.push_back({task_, depth, bound, result_.best, state_.prefix()});
    if (bound >= result_.best) return;
    if (depth == p_.decisions().size()) {
      Placement pl = state_.to_placement();
      const double value = objective_of(pl, p_.requests(), p_.infra(), p_.alpha(), p_.profiles());
      if (value < result_.best) {
        result_.best = value;
        result_.placement = std::move(pl);
      }
      return;
    }
    std::vector<int> instances;
    for (std::size_t n : p_.candidates()) {
      state_.candidate_instances(depth, n, instances);
      for (int i : instances) {
        if (!state_.try_assign(i, n)) continue;
        dfs();
        state_.undo();
        if (result_.exhausted) return;
      }
    }
  }

  const SearchProblem& p_;
  SearchState state_;
  std::size_t task_;
  std::uint64_t budget_;
  bool tracing_;
  TaskResult result_;
  std::vector<double> proc_;
  std::vector<double> com_;
};

inline constexpr std::size_t kSplitDepth = 2;
inline constexpr std::size_t kWaveSize = 8;

/// Feasible decision prefixes of length min(kSplitDepth, #decisions), in
/// search order. Each becomes an independent subtree task.
inline std::vector<std::vector<std::pair<int, std::size_t>>> split_tasks(const SearchProblem& p,
                                                                        std::uint64_t& nodes) {
  std::vector<std::vector<std::pair<int, std::size_t>>> out;
  const std::size_t depth = std::min(kSplitDepth, p.decisions().size());
  SearchState state(p);
  std::vector<std::pair<int, std::size_t>> prefix;
  std::vector<double> proc, com;
  std::function<void()> rec = [&] {
    if (state.depth() == depth) {
      out.push_back(prefix);
      return;
    }
    ++nodes;
    if (state.lower_bound(proc, com) == kInf) return;
    std::vector<int> instances;
    for (std::size_t n : p.candidates()) {
      state.candidate_instances(state.depth(), n, instances);
      for (int i : instances) {
        if (!state.try_assign(i, n)) continue;
        prefix.emplace_back(i, n);
        rec();
        prefix.pop_back();
        state.undo();
      }
    }
  };
  rec();
  return out;
}

}  // namespace detail

/// Provably optimal placement (or infeasible / budget_exhausted with the
/// incumbent). Subtrees below the first decisions are solved as tasks in
/// fixed waves; every task of a wave starts from the incumbent left by the
/// previous waves, so the result does not depend on the worker count.
inline SolveResult solve_exact(const Infrastructure& infra, const std::vector<Request>& requests,
                               double alpha, const SolveOptions& options = {}) {
  detail::check_alpha(alpha);
  const detail::SearchProblem problem(infra, requests, alpha, options.tier);
  SolveResult result;
  std::uint64_t nodes = 0;
  const auto tasks = detail::split_tasks(problem, nodes);
  const unsigned workers = worker_count(options.threads);
  const bool tracing = static_cast<bool>(options.trace);

  double incumbent = detail::kInf;
  std::optional<Placement> best;
  bool exhausted = false;
  for (std::size_t wave = 0; wave < tasks.size() && !exhausted; wave += detail::kWaveSize) {
    const std::size_t end = std::min(tasks.size(), wave + detail::kWaveSize);
    const std::uint64_t remaining = options.node_budget > nodes ? options.node_budget - nodes : 0;
    std::vector<detail::TaskResult> results(end - wave);
    const auto run_task = [&](std::size_t k) {
      detail::BranchAndBound bb(problem, k, incumbent, remaining, tracing);
      for (const auto& [i, n] : tasks[k]) {
        if (!bb.state().try_assign(i, n)) throw std::logic_error("task prefix no longer feasible");
      }
      results[k - wave] = bb.run();
    };
    parallel_for(wave, end, workers, run_task);
    for (auto& r : results) {
      nodes += r.nodes;
      exhausted = exhausted || r.exhausted;
      if (tracing) {
        for (const auto& rec : r.trace) options.trace(rec);
      }
      if (r.placement && r.best < incumbent) {
        incumbent = r.best;
        best = std::move(r.placement);
      }
    }
  }

  result.nodes_explored = nodes;
  if (best) {
    result.placement = std::move(*best);
    result.objective = incumbent;
    result.status = exhausted ? SolveStatus::budget_exhausted : SolveStatus::optimal;
  } else {
    result.placement = Placement::empty_for(requests);
    result.status = exhausted ? SolveStatus::budget_exhausted : SolveStatus::infeasible;
  }
  detail::finish(result, requests, infra, alpha);
  return result;
}

/// solve_exact over the nodes of one tier only.
inline SolveResult solve_restricted(const Infrastructure& infra, const std::vector<Request>& requests,
                                    double alpha, TierFilter tier, SolveOptions options = {}) {
  options.tier = tier;
  return solve_exact(infra, requests, alpha, options);
}

class OracleCapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Assignment-space size the oracle would enumerate (saturates at max).
inline std::uint64_t oracle_space(const Infrastructure& infra, const std::vector<Request>& requests,
                                  TierFilter tier = TierFilter::hybrid) {
  std::uint64_t nodes = 0;
  for (const auto& n : infra.nodes()) nodes += admits(tier, n.tier) ? 1 : 0;
  std::uint64_t space = 1;
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  for (const auto& req : requests) {
    for (const auto& t : req.tree.leaf_types()) {
      const auto idx = infra.type_index(t);
      const std::uint64_t options =
          nodes * static_cast<std::uint64_t>(idx ? infra.catalog()[*idx].instance_count : 0);
      if (options == 0) return 0;
      if (space > kMax / options) return kMax;
      space *= options;
    }
  }
  return space;
}

/// Exhaustive oracle: enumerates every (instance, node) choice for every
/// leaf, keeps the cheapest feasible one. Refuses spaces above `cap`.
inline SolveResult solve_bruteforce(const Infrastructure& infra, const std::vector<Request>& requests,
                                    double alpha, std::uint64_t cap,
                                    TierFilter tier = TierFilter::hybrid) {
  detail::check_alpha(alpha);
  const std::uint64_t space = oracle_space(infra, requests, tier);
  if (space > cap) {
    throw OracleCapacityError("oracle space " + std::to_string(space) + " exceeds cap " +
                              std::to_string(cap));
  }
  const auto profiles = profiles_of(requests, infra);
  std::vector<std::pair<std::size_t, std::size_t>> slots;
  std::vector<std::vector<Assignment>> choices;
  for (std::size_t r = 0; r < requests.size(); ++r) {
    for (std::size_t l = 0; l < profiles[r].leaves.size(); ++l) {
      slots.emplace_back(r, l);
      const std::size_t t = profiles[r].leaf_type[l];
      std::vector<Assignment> opts;
      for (std::size_t n = 0; n < infra.nodes().size(); ++n) {
        if (!admits(tier, infra.nodes()[n].tier)) continue;
        for (int i = 0; i < infra.catalog()[t].instance_count; ++i) opts.push_back({{t, i}, n});
      }
      choices.push_back(std::move(opts));
    }
  }

  SolveResult result;
  result.placement = Placement::empty_for(requests);
  if (space == 0) {
    detail::finish(result, requests, infra, alpha);
    return result;
  }
  std::vector<std::size_t> odometer(slots.size(), 0);
  Placement candidate = Placement::empty_for(requests);
  double best = detail::kInf;
  for (;;) {
    ++result.nodes_explored;
    candidate.deployed.clear();
    for (std::size_t s = 0; s < slots.size(); ++s) {
      const Assignment& a = choices[s][odometer[s]];
      candidate.assignments[slots[s].first][slots[s].second] = a;
      candidate.deployed.push_back(a);
    }
    std::sort(candidate.deployed.begin(), candidate.deployed.end());
    candidate.deployed.erase(std::unique(candidate.deployed.begin(), candidate.deployed.end()),
                             candidate.deployed.end());
    if (check_feasibility(candidate, requests, infra, profiles).empty()) {
      const double value = objective_of(candidate, requests, infra, alpha, profiles);
      if (value < best) {
        best = value;
        result.placement = candidate;
      }
    }
    std::size_t s = 0;
    while (s < slots.size() && ++odometer[s] == choices[s].size()) odometer[s++] = 0;
    if (s == slots.size()) break;
  }
  if (best < detail::kInf) result.status = SolveStatus::optimal;
  detail::finish(result, requests, infra, alpha);
  return result;
}

/// Uniformly random feasible placement by rejection sampling.
inline SolveResult random_feasible(const Infrastructure& infra, const std::vector<Request>& requests,
                                   double alpha, std::uint64_t seed, std::uint64_t max_tries,
                                   TierFilter tier = TierFilter::hybrid) {
  detail::check_alpha(alpha);
  const auto profiles = profiles_of(requests, infra);
  SplitMix64 rng(seed);
  std::vector<std::size_t> allowed;
  for (std::size_t n = 0; n < infra.nodes().size(); ++n) {
    if (admits(tier, infra.nodes()[n].tier)) allowed.push_back(n);
  }
  SolveResult result;
  result.status = SolveStatus::budget_exhausted;
  result.placement = Placement::empty_for(requests);
  if (allowed.empty()) return result;
  for (std::uint64_t attempt = 0; attempt < max_tries; ++attempt) {
    ++result.nodes_explored;
    Placement p = Placement::empty_for(requests);
    for (std::size_t r = 0; r < requests.size(); ++r) {
      for (std::size_t l = 0; l < profiles[r].leaves.size(); ++l) {
        const std::size_t t = profiles[r].leaf_type[l];
        const auto count = static_cast<std::int64_t>(infra.catalog()[t].instance_count);
        const auto pick = rng.uniform_int(0, count * static_cast<std::int64_t>(allowed.size()) - 1);
        p.assign(r, l, {{t, static_cast<int>(pick % count)}, allowed[static_cast<std::size_t>(pick / count)]});
      }
    }
    if (check_feasibility(p, requests, infra, profiles).empty()) {
      result.placement = std::move(p);
      result.status = SolveStatus::feasible;
      break;
    }
  }
  detail::finish(result, requests, infra, alpha);
  return result;
}

}  // namespace fogweave
