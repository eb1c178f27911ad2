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

/// \file milp.hpp
///
/// The placement problem as a mixed-integer linear program.
///
/// Variables
///   deploy   instance i of a used type on node n
///   assign   leaf of a request served by instance i on node n
///   edge     a non-first leaf's incoming traffic crosses compute link l
///   device   a request's device d attaches to node n
///   pair     linearised product assign(pred, i, s) * assign(leaf, j, t)
///            for every ordered, linked node pair s != t
///   par_max  continuous upper envelope of the branches of a parallel block,
///            one for processing time and one for communication time
///
/// Node pairs without a link get a "no_route" row instead of a pair
/// variable, and every instance may be hosted by at most one node.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fogweave/app_model.hpp"
#include "fogweave/evaluation.hpp"
#include "fogweave/infra_model.hpp"

namespace fogweave {

enum class VarFamily { deploy, assign, edge, device, pair, par_max };

inline const char* to_string(VarFamily f) {
  switch (f) {
    case VarFamily::deploy: return "deploy";
    case VarFamily::assign: return "assign";
    case VarFamily::edge: return "edge";
    case VarFamily::device: return "device";
    case VarFamily::pair: return "pair";
    case VarFamily::par_max: return "par_max";
  }
  return "?";
}

enum class Sense { le, ge, eq };

inline const char* to_string(Sense s) {
  switch (s) {
    case Sense::le: return "<=";
    case Sense::ge: return ">=";
    case Sense::eq: return "=";
  }
  return "?";
}

struct Variable {
  std::string name;
  bool binary = true;
  VarFamily family = VarFamily::deploy;
};

struct Term {
  std::size_t var = 0;
  double coef = 0.0;

  friend bool operator==(const Term&, const Term&) = default;
};

struct Row {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::le;
  double rhs = 0.0;
};

/// A minimisation model. `objective` is dense (one coefficient per
/// variable, zeros included).
struct MilpModel {
  std::vector<Variable> variables;
  std::vector<double> objective;
  std::vector<Row> rows;

  std::size_t count(VarFamily f) const {
    return static_cast<std::size_t>(std::count_if(variables.begin(), variables.end(),
                                                  [f](const Variable& v) { return v.family == f; }));
  }

  /// Rows whose name starts with `prefix` followed by '.' or end of name.
  std::size_t count_rows(const std::string& prefix) const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [&](const Row& r) {
      return r.name.compare(0, prefix.size(), prefix) == 0 &&
             (r.name.size() == prefix.size() || r.name[prefix.size()] == '.');
    }));
  }

  std::optional<std::size_t> find(const std::string& name) const {
    for (std::size_t i = 0; i < variables.size(); ++i) {
      if (variables[i].name == name) return i;
    }
    return std::nullopt;
  }
};

/// Linear expression used while building makespan terms.
using LinearExpr = std::vector<Term>;

class PlacementMilp {
 public:
  PlacementMilp(const Infrastructure& infra, const std::vector<Request>& requests, double alpha)
      : infra_(infra), requests_(requests), alpha_(alpha), profiles_(profiles_of(requests, infra)) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
    check_ids();
    build();
  }

  const MilpModel& model() const noexcept { return model_; }
  double alpha() const noexcept { return alpha_; }

  double objective_at(const std::vector<double>& values) const {
    check_size(values);
    double sum = 0.0;
    for (std::size_t j = 0; j < values.size(); ++j) sum += model_.objective[j] * values[j];
    return sum;
  }

  /// Every row satisfied within `tol`, binaries at 0 or 1, continuous >= 0.
  bool satisfies(const std::vector<double>& values, double tol = 1e-6) const {
    return first_violated(values, tol).empty();
  }

  /// Name of the first violated row or bound, empty when feasible.
  std::string first_violated(const std::vector<double>& values, double tol = 1e-6) const {
    check_size(values);
    for (std::size_t j = 0; j < values.size(); ++j) {
      const double v = values[j];
      if (model_.variables[j].binary ? (std::abs(v) > tol && std::abs(v - 1.0) > tol) : v < -tol) {
        return model_.variables[j].name;
      }
    }
    for (const auto& row : model_.rows) {
      double lhs = 0.0;
      double scale = std::max(1.0, std::abs(row.rhs));
      for (const auto& t : row.terms) {
        lhs += t.coef * values[t.var];
        scale = std::max(scale, std::abs(t.coef));
      }
      const double eps = tol * scale;
      const bool ok = row.sense == Sense::le   ? lhs <= row.rhs + eps
                      : row.sense == Sense::ge ? lhs >= row.rhs - eps
                                               : std::abs(lhs - row.rhs) <= eps;
      if (!ok) return row.name;
    }
    return {};
  }

  /// Variable vector of a complete placement. Pair variables are the
  /// products they stand for; each par_max takes the smallest value its
  /// rows allow.
  std::vector<double> encode(const Placement& placement) const {
    std::vector<double> v(model_.variables.size(), 0.0);
    for (const auto& d : placement.deployed) {
      if (auto it = deploy_.find(key(d.instance.type, d.instance.index, d.node)); it != deploy_.end()) {
        v[it->second] = 1.0;
      }
    }
    for (std::size_t r = 0; r < requests_.size(); ++r) {
      const auto& prof = profiles_[r];
      for (std::size_t l = 0; l < prof.leaves.size(); ++l) {
        const Assignment& a = detail::slot(placement.assignments.at(r), l, requests_[r]);
        v[assign_index(r, l, a.instance.index, a.node)] = 1.0;
        if (auto p = prof.leaves[l].predecessor) {
          const Assignment& b = detail::slot(placement.assignments.at(r), *p, requests_[r]);
          if (a.node != b.node) {
            const int link = infra_.link_index(a.node, b.node);
            if (link != Infrastructure::kNoLink) v[edge_.at(key(r, l, static_cast<std::size_t>(link)))] = 1.0;
          }
        }
      }
      const Assignment& first = detail::slot(placement.assignments.at(r), Request::first_vnf(), requests_[r]);
      for (std::size_t k = 0; k < prof.devices.size(); ++k) {
        v[device_.at(key(r, first.node, k))] = 1.0;
      }
    }
    for (const auto& [q, ab] : pair_factors_) v[q] = v[ab.first] * v[ab.second];
    for (const auto& [z, rows] : par_rows_) {
      double best = 0.0;
      for (std::size_t ri : rows) {
        double need = 0.0;  // z - sum(c v) >= 0
        for (const auto& t : model_.rows[ri].terms) {
          if (t.var != z) need -= t.coef * v[t.var];
        }
        best = std::max(best, need);
      }
      v[z] = best;
    }
    return v;
  }

  /// Placement read from the deploy and assign variables.
  Placement decode(const std::vector<double>& values) const {
    check_size(values);
    Placement p = Placement::empty_for(requests_);
    for (const auto& [k, j] : deploy_) {
      if (values[j] > 0.5) p.deploy({{k[0], static_cast<int>(k[1])}, k[2]});
    }
    for (const auto& [k, j] : assign_) {
      if (values[j] > 0.5) {
        const std::size_t t = profiles_[k[0]].leaf_type[k[1]];
        p.assignments[k[0]][k[1]] = Assignment{{t, static_cast<int>(k[2])}, k[3]};
      }
    }
    return p;
  }

 private:
  using Key = std::vector<std::size_t>;
  static Key key(std::size_t a, std::size_t b, std::size_t c) { return {a, b, c}; }
  static Key key(std::size_t a, std::size_t b, std::size_t c, std::size_t d) { return {a, b, c, d}; }

  void check_size(const std::vector<double>& values) const {
    if (values.size() != model_.variables.size()) {
      throw std::invalid_argument("expected " + std::to_string(model_.variables.size()) +
                                  " values, got " + std::to_string(values.size()));
    }
  }

  // Names are joined with '.', so ids must not contain one.
  void check_ids() const {
    const auto ok = [](const std::string& id) {
      if (id.empty() || !std::isalpha(static_cast<unsigned char>(id[0]))) return false;
      return std::all_of(id.begin(), id.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
      });
    };
    const auto require = [&](const std::string& id) {
      if (!ok(id)) throw std::invalid_argument("identifier '" + id + "' is not [A-Za-z][A-Za-z0-9_]*");
    };
    for (const auto& n : infra_.nodes()) require(n.id);
    for (const auto& d : infra_.devices()) require(d);
    for (const auto& l : infra_.links()) require(l.id);
    for (const auto& t : infra_.catalog()) require(t.id);
    for (const auto& r : requests_) require(r.id);
  }

  std::size_t add_var(std::string name, VarFamily family, bool binary = true) {
    model_.variables.push_back({std::move(name), binary, family});
    model_.objective.push_back(0.0);
    return model_.variables.size() - 1;
  }

  std::size_t add_row(std::string name, std::vector<Term> terms, Sense sense, double rhs) {
    model_.rows.push_back({std::move(name), std::move(terms), sense, rhs});
    return model_.rows.size() - 1;
  }

  std::size_t assign_index(std::size_t r, std::size_t l, int i, std::size_t n) const {
    return assign_.at(key(r, l, static_cast<std::size_t>(i), n));
  }

  std::string leaf_name(std::size_t r, std::size_t l) const {
    return requests_[r].id + "." + std::to_string(l);
  }

  void build() {
    const auto& nodes = infra_.nodes();
    const auto& catalog = infra_.catalog();
    const auto& links = infra_.links();
    const std::size_t N = nodes.size();

    std::vector<char> used(catalog.size(), 0);
    for (const auto& p : profiles_) {
      for (std::size_t t : p.leaf_type) used[t] = 1;
    }
    std::vector<std::size_t> compute_links;
    for (std::size_t l = 0; l < links.size(); ++l) {
      if (infra_.node_index(links[l].a) && infra_.node_index(links[l].b)) compute_links.push_back(l);
    }

    // Variables.
    for (std::size_t t = 0; t < catalog.size(); ++t) {
      if (!used[t]) continue;
      for (int i = 0; i < catalog[t].instance_count; ++i) {
        for (std::size_t n = 0; n < N; ++n) {
          deploy_[key(t, static_cast<std::size_t>(i), n)] =
              add_var("deploy." + catalog[t].id + "." + std::to_string(i) + "." + nodes[n].id, VarFamily::deploy);
        }
      }
    }
    for (std::size_t r = 0; r < requests_.size(); ++r) {
      const auto& prof = profiles_[r];
      for (std::size_t l = 0; l < prof.leaves.size(); ++l) {
        const auto& type = catalog[prof.leaf_type[l]];
        for (int i = 0; i < type.instance_count; ++i) {
          for (std::size_t n = 0; n < N; ++n) {
            const auto j = add_var("assign." + leaf_name(r, l) + "." + std::to_string(i) + "." + nodes[n].id,
                                   VarFamily::assign);
            assign_[key(r, l, static_cast<std::size_t>(i), n)] = j;
            model_.objective[j] = alpha_ * (prof.leaves[l].node_weight * nodes[n].cost_per_vcpu *
                                                type.requirement_vcpu +
                                            type.license_cost);
          }
        }
      }
    }
    for (std::size_t r = 0; r < requests_.size(); ++r) {
      const auto& prof = profiles_[r];
      for (std::size_t l = 0; l < prof.leaves.size(); ++l) {
        if (!prof.leaves[l].predecessor) continue;
        for (std::size_t li : compute_links) {
          const auto j = add_var("edge." + leaf_name(r, l) + "." + links[li].id, VarFamily::edge);
          edge_[key(r, l, li)] = j;
          model_.objective[j] = alpha_ * prof.leaves[l].edge_weight * prof.traffic_bits * links[li].cost_per_bit;
        }
      }
    }
    for (std::size_t r = 0; r < requests_.size(); ++r) {
      const auto& prof = profiles_[r];
      for (std::size_t n = 0; n < N; ++n) {
        for (std::size_t k = 0; k < prof.devices.size(); ++k) {
          const std::size_t d = prof.devices[k];
          const auto j = add_var("device." + requests_[r].id + "." + nodes[n].id + "." + infra_.devices()[d],
                                 VarFamily::device);
          device_[key(r, n, k)] = j;
          if (const Link* link = infra_.device_link(d, n)) {
            model_.objective[j] = alpha_ * prof.traffic_bits * link->cost_per_bit +
                                  (1.0 - alpha_) * prof.delay_units * link->delay_ms;
          }
        }
      }
    }
    for (std::size_t r = 0; r < requests_.size(); ++r) {
      const auto& prof = profiles_[r];
      for (std::size_t l = 0; l < prof.leaves.size(); ++l) {
        const auto pred = prof.leaves[l].predecessor;
        if (!pred) continue;
        const int ip = catalog[prof.leaf_type[*pred]].instance_count;
        const int il = catalog[prof.leaf_type[l]].instance_count;
        for (int i = 0; i < ip; ++i) {
          for (int j = 0; j < il; ++j) {
            for (std::size_t s = 0; s < N; ++s) {
              for (std::size_t t = 0; t < N; ++t) {
                if (s == t || infra_.link_index(s, t) == Infrastructure::kNoLink) continue;
                const auto q = add_var("pair." + leaf_name(r, l) + "." + std::to_string(i) + "." +
                                           std::to_string(j) + "." + nodes[s].id + "." + nodes[t].id,
                                       VarFamily::pair);
                pair_factors_.emplace_back(q, std::make_pair(assign_index(r, *pred, i, s),
                                                             assign_index(r, l, j, t)));
                pair_meta_.push_back({r, l, s, t});
              }
            }
          }
        }
      }
    }

    // Capacities.
    for (std::size_t n = 0; n < N; ++n) {
      std::vector<Term> terms;
      for (const auto& [k, j] : deploy_) {
        if (k[2] == n) terms.push_back({j, catalog[k[0]].requirement_vcpu});
      }
      std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
      add_row("cap_node." + nodes[n].id, std::move(terms), Sense::le, nodes[n].usable_vcpu());
    }
    for (std::size_t li : compute_links) {
      std::vector<Term> terms;
      for (std::size_t r = 0; r < requests_.size(); ++r) {
        for (std::size_t l = 0; l < profiles_[r].leaves.size(); ++l) {
          if (auto it = edge_.find(key(r, l, li)); it != edge_.end()) {
            terms.push_back({it->second, profiles_[r].traffic_bits});
          }
        }
      }
      add_row("cap_link." + links[li].id, std::move(terms), Sense::le, links[li].usable_bits());
    }
    for (std::size_t li = 0; li < links.size(); ++li) {
      const auto a = infra_.node_index(links[li].a);
      const auto b = infra_.node_index(links[li].b);
      if (a && b) continue;
      const std::size_t n = a ? *a : *b;
      const std::size_t d = *infra_.device_index(a ? links[li].b : links[li].a);
      std::vector<Term> terms;
      for (std::size_t r = 0; r < requests_.size(); ++r) {
        const auto& devs = profiles_[r].devices;
        for (std::size_t k = 0; k < devs.size(); ++k) {
          if (devs[k] == d) terms.push_back({device_.at(key(r, n, k)), profiles_[r].traffic_bits});
        }
      }
      if (!terms.empty()) add_row("cap_device_link." + links[li].id, std::move(terms), Sense::le, links[li].usable_bits());
    }

    // Device attachment follows the first VNF; missing device links are forbidden.
    for (std::size_t r = 0; r < requests_.size(); ++r) {
      const auto& prof = profiles_[r];
      const auto& type = catalog[prof.leaf_type[Request::first_vnf()]];
      for (std::size_t n = 0; n < N; ++n) {
        for (std::size_t k = 0; k < prof.devices.size(); ++k) {
          std::vector<Term> terms{{device_.at(key(r, n, k)), 1.0}};
          for (int i = 0; i < type.instance_count; ++i) {
            terms.push_back({assign_index(r, Request::first_vnf(), i, n), -1.0});
          }
          const std::string suffix = requests_[r].id + "." + nodes[n].id + "." + infra_.devices()[prof.devices[k]];
          add_row("device_attach." + suffix, std::move(terms), Sense::eq, 0.0);
          if (infra_.device_link(prof.devices[k], n) == nullptr) {
            add_row("no_device_route." + suffix, {{device_.at(key(r, n, k)), 1.0}}, Sense::le, 0.0);
          }
        }
      }
    }

    // Pair linearisation and edge activation.
    std::map<Key, std::vector<std::size_t>> pairs_on_edge;
    for (std::size_t k = 0; k < pair_factors_.size(); ++k) {
      const auto [q, ab] = pair_factors_[k];
      const auto& m = pair_meta_[k];
      const auto li = static_cast<std::size_t>(infra_.link_index(m[2], m[3]));
      const std::size_t y = edge_.at(key(m[0], m[1], li));
      const std::string& name = model_.variables[q].name;
      const std::string suffix = name.substr(name.find('.') + 1);
      add_row("pair_edge." + suffix, {{q, 1.0}, {y, -1.0}}, Sense::le, 0.0);
      add_row("pair_pred." + suffix, {{q, 1.0}, {ab.first, -1.0}}, Sense::le, 0.0);
      add_row("pair_leaf." + suffix, {{q, 1.0}, {ab.second, -1.0}}, Sense::le, 0.0);
      add_row("pair_both." + suffix, {{q, 1.0}, {ab.first, -1.0}, {ab.second, -1.0}}, Sense::ge, -1.0);
      pairs_on_edge[key(m[0], m[1], li)].push_back(q);
    }
    for (const auto& [k, y] : edge_) {
      std::vector<Term> terms{{y, 1.0}};
      if (auto it = pairs_on_edge.find(k); it != pairs_on_edge.end()) {
        for (std::size_t q : it->second) terms.push_back({q, -1.0});
      }
      add_row("edge_use." + model_.variables[y].name.substr(5), std::move(terms), Sense::le, 0.0);
    }
    for (std::size_t r = 0; r < requests_.size(); ++r) {
      const auto& prof = profiles_[r];
      for (std::size_t l = 0; l < prof.leaves.size(); ++l) {
        const auto pred = prof.leaves[l].predecessor;
        if (!pred) continue;
        const int ip = catalog[prof.leaf_type[*pred]].instance_count;
        const int il = catalog[prof.leaf_type[l]].instance_count;
        for (int i = 0; i < ip; ++i) {
          for (int j = 0; j < il; ++j) {
            for (std::size_t s = 0; s < N; ++s) {
              for (std::size_t t = 0; t < N; ++t) {
                if (s == t || infra_.link_index(s, t) != Infrastructure::kNoLink) continue;
                add_row("no_route." + leaf_name(r, l) + "." + std::to_string(i) + "." + std::to_string(j) +
                            "." + nodes[s].id + "." + nodes[t].id,
                        {{assign_index(r, *pred, i, s), 1.0}, {assign_index(r, l, j, t), 1.0}}, Sense::le, 1.0);
              }
            }
          }
        }
      }
    }

    // Instances.
    for (const auto& [k, xd] : deploy_) {
      std::vector<Term> terms;
      for (const auto& [ka, j] : assign_) {
        if (ka[2] == k[1] && ka[3] == k[2] && profiles_[ka[0]].leaf_type[ka[1]] == k[0]) {
          terms.push_back({j, profiles_[ka[0]].traffic_bits});
        }
      }
      std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
      const std::string& name = model_.variables[xd].name;
      add_row("cap_instance." + name.substr(7), std::move(terms), Sense::le,
              infra_.vnf_usage_threshold() * catalog[k[0]].capacity_bits);
    }
    for (std::size_t r = 0; r < requests_.size(); ++r) {
      const auto& prof = profiles_[r];
      for (std::size_t l = 0; l < prof.leaves.size(); ++l) {
        std::vector<Term> terms;
        for (int i = 0; i < catalog[prof.leaf_type[l]].instance_count; ++i) {
          for (std::size_t n = 0; n < N; ++n) terms.push_back({assign_index(r, l, i, n), 1.0});
        }
        add_row("one_assign." + leaf_name(r, l), std::move(terms), Sense::eq, 1.0);
      }
    }
    for (std::size_t r = 0; r < requests_.size(); ++r) {
      const auto& prof = profiles_[r];
      for (std::size_t l = 0; l < prof.leaves.size(); ++l) {
        const std::size_t t = prof.leaf_type[l];
        for (int i = 0; i < catalog[t].instance_count; ++i) {
          for (std::size_t n = 0; n < N; ++n) {
            const std::size_t xa = assign_index(r, l, i, n);
            add_row("assign_deployed." + model_.variables[xa].name.substr(7),
                    {{xa, 1.0}, {deploy_.at(key(t, static_cast<std::size_t>(i), n)), -1.0}}, Sense::le, 0.0);
          }
        }
      }
    }
    for (std::size_t t = 0; t < catalog.size(); ++t) {
      if (!used[t]) continue;
      std::vector<Term> cover;
      for (int i = 0; i < catalog[t].instance_count; ++i) {
        std::vector<Term> host;
        for (std::size_t n = 0; n < N; ++n) {
          const std::size_t j = deploy_.at(key(t, static_cast<std::size_t>(i), n));
          cover.push_back({j, 1.0});
          host.push_back({j, 1.0});
        }
        add_row("single_host." + catalog[t].id + "." + std::to_string(i), std::move(host), Sense::le, 1.0);
      }
      add_row("cover." + catalog[t].id, std::move(cover), Sense::ge, 1.0);
    }

    // Makespan.
    for (std::size_t r = 0; r < requests_.size(); ++r) {
      std::size_t leaf = 0;
      std::size_t par_count = 0;
      const auto [proc, com] = makespan_expr(requests_[r].tree.root, r, leaf, par_count, compute_links);
      for (const auto& t : proc) model_.objective[t.var] += (1.0 - alpha_) * t.coef;
      for (const auto& t : com) model_.objective[t.var] += (1.0 - alpha_) * t.coef;
    }
  }

  static LinearExpr scaled(const LinearExpr& e, double f) {
    LinearExpr out = e;
    for (auto& t : out) t.coef *= f;
    return out;
  }

  static void append(LinearExpr& to, const LinearExpr& e) { to.insert(to.end(), e.begin(), e.end()); }

  // Processing and communication time of a subtree as linear expressions.
  std::pair<LinearExpr, LinearExpr> makespan_expr(const TreeNode& node, std::size_t r, std::size_t& leaf,
                                                  std::size_t& par_count,
                                                  const std::vector<std::size_t>& compute_links) {
    const auto& prof = profiles_[r];
    LinearExpr proc;
    LinearExpr com;
    if (node.kind == NodeKind::leaf) {
      const std::size_t l = leaf++;
      const auto& type = infra_.catalog()[prof.leaf_type[l]];
      for (int i = 0; i < type.instance_count; ++i) {
        for (std::size_t n = 0; n < infra_.nodes().size(); ++n) {
          proc.push_back({assign_index(r, l, i, n),
                          prof.delay_units * detail::processing_delay(type, infra_.nodes()[n])});
        }
      }
      if (prof.leaves[l].predecessor) {
        for (std::size_t li : compute_links) {
          com.push_back({edge_.at(key(r, l, li)), prof.delay_units * infra_.links()[li].delay_ms});
        }
      }
      return {proc, com};
    }
    std::vector<std::pair<LinearExpr, LinearExpr>> parts;
    for (const auto& c : node.children) parts.push_back(makespan_expr(c, r, leaf, par_count, compute_links));
    switch (node.kind) {
      case NodeKind::par: {
        const std::size_t k = par_count++;
        const std::string suffix = requests_[r].id + "." + std::to_string(k);
        const auto zp = add_var("par_max.proc." + suffix, VarFamily::par_max, false);
        const auto zc = add_var("par_max.comm." + suffix, VarFamily::par_max, false);
        for (std::size_t c = 0; c < parts.size(); ++c) {
          LinearExpr rp{{zp, 1.0}};
          append(rp, scaled(parts[c].first, -1.0));
          par_rows_[zp].push_back(add_row("par_bound.proc." + suffix + "." + std::to_string(c), std::move(rp), Sense::ge, 0.0));
          LinearExpr rc{{zc, 1.0}};
          append(rc, scaled(parts[c].second, -1.0));
          par_rows_[zc].push_back(add_row("par_bound.comm." + suffix + "." + std::to_string(c), std::move(rc), Sense::ge, 0.0));
        }
        proc.push_back({zp, 1.0});
        com.push_back({zc, 1.0});
        break;
      }
      case NodeKind::sel:
        for (std::size_t c = 0; c < parts.size(); ++c) {
          append(proc, scaled(parts[c].first, node.probabilities[c]));
          append(com, scaled(parts[c].second, node.probabilities[c]));
        }
        break;
      default: {
        const double f = node.kind == NodeKind::loop ? expected_iterations(node.continuation) : 1.0;
        for (auto& p : parts) {
          append(proc, scaled(p.first, f));
          append(com, scaled(p.second, f));
        }
        break;
      }
    }
    return {proc, com};
  }

  const Infrastructure& infra_;
  const std::vector<Request>& requests_;
  double alpha_;
  std::vector<RequestProfile> profiles_;
  MilpModel model_;
  std::map<Key, std::size_t> deploy_;  // (type, instance, node)
  std::map<Key, std::size_t> assign_;  // (request, leaf, instance, node)
  std::map<Key, std::size_t> edge_;    // (request, leaf, link)
  std::map<Key, std::size_t> device_;  // (request, node, device position)
  std::vector<std::pair<std::size_t, std::pair<std::size_t, std::size_t>>> pair_factors_;
  std::vector<Key> pair_meta_;  // (request, leaf, s, t)
  std::map<std::size_t, std::vector<std::size_t>> par_rows_;
};

}  // namespace fogweave
