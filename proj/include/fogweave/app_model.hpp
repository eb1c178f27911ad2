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

/// \file app_model.hpp
///
/// Applications as structured trees. Leaves are VNFs; inner nodes are one of
/// the four sub-structures (sequence, parallel, selection, loop). Everything
/// the cost and makespan folds need from the tree shape is derived here: the
/// expected-execution weight of every leaf and its immediate predecessor.

#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace fogweave {

inline constexpr double kProbabilityTolerance = 1e-9;

struct VnfType {
  std::string id;
  double license_cost = 0.0;      // $ per instance used
  double capacity_bits = 0.0;     // traffic one instance can serve
  double requirement_vcpu = 1.0;  // vCPU held on the hosting node
  int instance_count = 1;
  double delay_cloud_ms = 0.0;  // per delay unit of traffic
  double delay_fog_ms = 0.0;

  friend bool operator==(const VnfType&, const VnfType&) = default;
};

enum class NodeKind { leaf, seq, par, sel, loop };

inline const char* to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::leaf: return "vnf";
    case NodeKind::seq: return "seq";
    case NodeKind::par: return "par";
    case NodeKind::sel: return "sel";
    case NodeKind::loop: return "loop";
  }
  return "?";
}

/// One node of a structured tree. A loop's children form its body and are
/// executed as a sequence.
struct TreeNode {
  NodeKind kind = NodeKind::leaf;
  std::string type_id;                // leaf
  std::vector<TreeNode> children;     // seq, par, sel, loop body
  std::vector<double> probabilities;  // sel
  double continuation = 0.0;          // loop, q

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

inline TreeNode vnf(std::string type_id) {
  TreeNode node;
  node.type_id = std::move(type_id);
  return node;
}

inline TreeNode seq(std::vector<TreeNode> children) {
  return TreeNode{NodeKind::seq, {}, std::move(children), {}, 0.0};
}

inline TreeNode par(std::vector<TreeNode> children) {
  return TreeNode{NodeKind::par, {}, std::move(children), {}, 0.0};
}

inline TreeNode sel(std::vector<double> probabilities, std::vector<TreeNode> branches) {
  return TreeNode{NodeKind::sel, {}, std::move(branches), std::move(probabilities), 0.0};
}

inline TreeNode loop(double q, std::vector<TreeNode> body) {
  return TreeNode{NodeKind::loop, {}, std::move(body), {}, q};
}

struct StructuredTree {
  TreeNode root;

  friend bool operator==(const StructuredTree&, const StructuredTree&) = default;

  /// Leaf type ids in execution (pre-order) order. Leaf references across
  /// the library are positions in this list.
  std::vector<std::string> leaf_types() const {
    std::vector<std::string> out;
    collect(root, out);
    return out;
  }

  std::size_t leaf_count() const { return leaf_types().size(); }

 private:
  static void collect(const TreeNode& node, std::vector<std::string>& out) {
    if (node.kind == NodeKind::leaf) {
      out.push_back(node.type_id);
      return;
    }
    for (const auto& child : node.children) collect(child, out);
  }
};

struct Request {
  std::string id;
  StructuredTree tree;
  double traffic_bits = 0.0;
  std::vector<std::string> devices;

  friend bool operator==(const Request&, const Request&) = default;

  /// The VNF talking to the devices. Validation guarantees that leaf 0 is
  /// reached through sequence entries only, so it always runs exactly once.
  static constexpr std::size_t first_vnf() noexcept { return 0; }

  /// V^R, the required VNF types.
  std::set<std::string> required_types() const {
    auto types = tree.leaf_types();
    return {types.begin(), types.end()};
  }
};

struct LeafAnnotation {
  std::size_t leaf = 0;
  std::string type_id;
  double node_weight = 1.0;
  std::optional<std::size_t> predecessor;
  double edge_weight = 1.0;
};

/// Mean of the geometric iteration count P(N = n) = (1 - q) q^n.
inline double expected_iterations(double q) {
  if (!(q >= 0.0) || !(q < 1.0)) {
    throw std::domain_error("loop continuation probability must lie in [0, 1), got " +
                            std::to_string(q));
  }
  return q / (1.0 - q);
}

namespace detail {

struct Annotator {
  std::vector<LeafAnnotation> out;

  // Returns the exit leaf of `node`.
  std::optional<std::size_t> walk(const TreeNode& node, double weight,
                                  std::optional<std::size_t> pred) {
    switch (node.kind) {
      case NodeKind::leaf: {
        const std::size_t index = out.size();
        out.push_back({index, node.type_id, weight, pred, weight});
        return index;
      }
      case NodeKind::seq: {
        for (const auto& child : node.children) pred = walk(child, weight, pred);
        return pred;
      }
      case NodeKind::par:
      case NodeKind::sel: {
        std::optional<std::size_t> exit = pred;
        for (std::size_t i = 0; i < node.children.size(); ++i) {
          const double branch = node.kind == NodeKind::sel ? node.probabilities.at(i) : 1.0;
          exit = walk(node.children[i], weight * branch, pred);
        }
        return exit;
      }
      case NodeKind::loop: {
        const double body_weight = weight * expected_iterations(node.continuation);
        for (const auto& child : node.children) pred = walk(child, body_weight, pred);
        return pred;
      }
    }
    return pred;
  }
};

}  // namespace detail

/// Expected-execution weight and predecessor of every leaf, in leaf order.
///
/// Predecessors: inside a sequence a child's entry follows the previous
/// child's exit; all branches of a par/sel follow whatever precedes the
/// block; a loop body follows whatever precedes the loop. The exit of a
/// par/sel is the exit of its last declared child.
inline std::vector<LeafAnnotation> annotate_leaves(const StructuredTree& tree) {
  detail::Annotator annotator;
  annotator.walk(tree.root, 1.0, std::nullopt);
  return std::move(annotator.out);
}

struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const noexcept { return violations.empty(); }

  std::string to_string() const {
    std::ostringstream os;
    for (const auto& v : violations) os << v << '\n';
    return os.str();
  }
};

namespace detail {

inline std::string format_number(double value) {
  std::ostringstream os;
  os.precision(12);
  os << value;
  return os.str();
}

inline void validate_node(const TreeNode& node, const std::string& path,
                          const std::unordered_map<std::string, const VnfType*>& catalog,
                          ValidationReport& report) {
  const auto here = path.empty() ? std::string(to_string(node.kind)) : path;
  if (node.kind == NodeKind::leaf) {
    if (!node.children.empty()) report.violations.push_back(here + ": VNF leaf has children");
    if (catalog.find(node.type_id) == catalog.end()) {
      report.violations.push_back(here + ": unknown VNF type '" + node.type_id + "'");
    }
    return;
  }
  const std::size_t min_children = node.kind == NodeKind::loop ? 1 : 2;
  if (node.children.size() < min_children) {
    report.violations.push_back(here + ": " + to_string(node.kind) + " needs at least " +
                                std::to_string(min_children) + " children, has " +
                                std::to_string(node.children.size()));
  }
  if (node.kind == NodeKind::sel) {
    if (node.probabilities.size() != node.children.size()) {
      report.violations.push_back(here + ": " + std::to_string(node.probabilities.size()) +
                                  " probabilities for " + std::to_string(node.children.size()) +
                                  " branches");
    }
    double sum = 0.0;
    for (double p : node.probabilities) {
      if (!(p > 0.0)) {
        report.violations.push_back(here + ": selection probability " + format_number(p) +
                                    " is not positive");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kProbabilityTolerance) {
      report.violations.push_back(here + ": selection probabilities sum to " +
                                  format_number(sum));
    }
  }
  if (node.kind == NodeKind::loop && !(node.continuation >= 0.0 && node.continuation < 1.0)) {
    report.violations.push_back(here + ": loop probability q=" +
                                format_number(node.continuation) + " outside [0, 1)");
  }
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    validate_node(node.children[i], here + "/" + std::to_string(i), catalog, report);
  }
}

}  // namespace detail

/// Collects every invariant violation of `req` against `catalog`.
template <typename Catalog>
ValidationReport validate_request(const Request& req, const Catalog& catalog) {
  ValidationReport report;
  std::unordered_map<std::string, const VnfType*> by_id;
  for (const VnfType& type : catalog) by_id.emplace(type.id, &type);

  const std::string prefix = "request '" + req.id + "': ";
  if (!(req.traffic_bits > 0.0)) report.violations.push_back(prefix + "traffic must be positive");
  if (req.devices.empty()) report.violations.push_back(prefix + "no IoT devices");

  ValidationReport tree_report;
  detail::validate_node(req.tree.root, "", by_id, tree_report);
  for (auto& v : tree_report.violations) report.violations.push_back(prefix + v);

  std::set<std::string> seen;
  for (const auto& type : req.tree.leaf_types()) {
    if (!seen.insert(type).second) {
      report.violations.push_back(prefix + "VNF type '" + type + "' used more than once");
    }
  }

  // The first VNF must run exactly once: reach it through sequence entries.
  const TreeNode* entry = &req.tree.root;
  while (entry->kind == NodeKind::seq && !entry->children.empty()) entry = &entry->children.front();
  if (entry->kind != NodeKind::leaf) {
    report.violations.push_back(prefix + "execution must start with a single VNF, found " +
                                to_string(entry->kind));
  }
  return report;
}

}  // namespace fogweave
