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

/// \file config.hpp
///
/// YAML scenario files. Units are part of every field name; values are
/// converted to the library's internal units (bits, $/bit) on load.
///
///   alpha: 0.5
///   delay_unit_kb: 80
///   vnf_usage_threshold: 1
///   solver: {node_budget: 200000000, oracle_cap: 200000}
///   nodes:
///     - {id: cloud1, tier: cloud, capacity_vcpu: 8, cost_per_vcpu: 0.1}
///   devices: [iot1]
///   links:
///     - {a: iot1, b: cloud1, bandwidth_mbps: 10000, cost_per_gb: 4, delay_ms: 25}
///   vnf_types:
///     - {id: sense, license_cost: 100, capacity_kb: 240, requirement_vcpu: 2,
///        instances: 1, delay_cloud_ms: 3.12, delay_fog_ms: 0.03}
///   requests:
///     - id: app
///       traffic_kb: 80
///       devices: [iot1]
///       tree: {seq: [sense, {loop: {q: 0.25, body: [a, b]}},
///                    {sel: {p: [0.5, 0.5], branches: [c, d]}}]}
///
/// A bare string inside a tree is a VNF leaf; {vnf: id} is the long form.
/// Optional fields: usage_threshold (nodes and links, default 1), link id
/// (default "<a>_<b>"), alpha, delay_unit_kb, vnf_usage_threshold, solver.

#include <yaml-cpp/yaml.h>

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fogweave/app_model.hpp"
#include "fogweave/csv.hpp"
#include "fogweave/infra_model.hpp"
#include "fogweave/scenario.hpp"

namespace fogweave {

/// Invalid configuration; the message starts with "<source>:<line>:".
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolverConfig {
  std::uint64_t node_budget = 200'000'000;
  std::uint64_t oracle_cap = 200'000;

  friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

struct ScenarioConfig {
  Scenario scenario;
  double alpha = 0.5;
  SolverConfig solver;
};

namespace detail {

class ConfigReader {
 public:
  explicit ConfigReader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& what) const {
    const auto m = at.Mark();
    std::ostringstream os;
    os << source_;
    if (!m.is_null()) os << ':' << m.line + 1 << ':' << m.column + 1;
    os << ": " << what;
    throw ConfigError(os.str());
  }

  void require_map(const YAML::Node& n, const std::string& what) const {
    if (!n.IsMap()) fail(n, what + " must be a mapping");
  }

  void require_seq(const YAML::Node& n, const std::string& what) const {
    if (!n.IsSequence()) fail(n, what + " must be a list");
  }

  void only_keys(const YAML::Node& map, std::initializer_list<const char*> allowed,
                 const std::string& what) const {
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      bool ok = false;
      for (const char* a : allowed) ok = ok || key == a;
      if (!ok) fail(kv.first, "unknown field '" + key + "' in " + what);
    }
  }

  YAML::Node field(const YAML::Node& map, const char* key, const std::string& what) const {
    const YAML::Node n = map[key];
    if (!n) fail(map, what + ": missing field '" + key + "'");
    return n;
  }

  double number(const YAML::Node& n, const std::string& what) const {
    if (!n.IsScalar()) fail(n, what + " must be a number");
    try {
      return n.as<double>();
    } catch (const YAML::Exception&) {
      fail(n, what + " must be a number, got '" + n.Scalar() + "'");
    }
  }

  double number(const YAML::Node& map, const char* key, const std::string& what) const {
    return number(field(map, key, what), what + "." + key);
  }

  double number_or(const YAML::Node& map, const char* key, double fallback, const std::string& what) const {
    const YAML::Node n = map[key];
    return n ? number(n, what + "." + key) : fallback;
  }

  std::uint64_t count(const YAML::Node& n, const std::string& what) const {
    if (!n.IsScalar()) fail(n, what + " must be a non-negative integer");
    try {
      return n.as<std::uint64_t>();
    } catch (const YAML::Exception&) {
      fail(n, what + " must be a non-negative integer, got '" + n.Scalar() + "'");
    }
  }

  std::string text(const YAML::Node& n, const std::string& what) const {
    if (!n.IsScalar()) fail(n, what + " must be a string");
    return n.Scalar();
  }

  std::string text(const YAML::Node& map, const char* key, const std::string& what) const {
    return text(field(map, key, what), what + "." + key);
  }

  std::vector<std::string> texts(const YAML::Node& n, const std::string& what) const {
    require_seq(n, what);
    std::vector<std::string> out;
    for (const auto& item : n) out.push_back(text(item, what + " item"));
    return out;
  }

  TreeNode tree(const YAML::Node& n) const {
    if (n.IsScalar()) return vnf(n.Scalar());
    if (!n.IsMap() || n.size() != 1) {
      fail(n, "tree node must be a VNF id or a mapping with one of vnf, seq, par, sel, loop");
    }
    const auto kv = *n.begin();
    const auto kind = kv.first.as<std::string>();
    const YAML::Node body = kv.second;
    if (kind == "vnf") return vnf(text(body, "vnf"));
    if (kind == "seq" || kind == "par") {
      auto children = list(body, kind);
      return kind == "seq" ? seq(std::move(children)) : par(std::move(children));
    }
    if (kind == "sel") {
      require_map(body, "sel");
      only_keys(body, {"p", "branches"}, "sel");
      const YAML::Node p = field(body, "p", "sel");
      require_seq(p, "sel.p");
      std::vector<double> probs;
      for (const auto& x : p) probs.push_back(number(x, "sel.p item"));
      return sel(std::move(probs), list(field(body, "branches", "sel"), "sel.branches"));
    }
    if (kind == "loop") {
      require_map(body, "loop");
      only_keys(body, {"q", "body"}, "loop");
      return loop(number(body, "q", "loop"), list(field(body, "body", "loop"), "loop.body"));
    }
    fail(kv.first, "unknown tree node kind '" + kind + "'");
  }

  std::vector<TreeNode> list(const YAML::Node& n, const std::string& what) const {
    require_seq(n, what);
    std::vector<TreeNode> out;
    for (const auto& c : n) out.push_back(tree(c));
    return out;
  }

  ScenarioConfig read(const YAML::Node& root) const {
    require_map(root, "configuration");
    only_keys(root,
              {"alpha", "delay_unit_kb", "vnf_usage_threshold", "solver", "nodes", "devices", "links",
               "vnf_types", "requests"},
              "configuration");
    ScenarioConfig cfg;
    cfg.alpha = number_or(root, "alpha", 0.5, "config");
    if (!(cfg.alpha >= 0.0 && cfg.alpha <= 1.0)) fail(root["alpha"], "alpha must lie in [0, 1]");
    const double delay_unit_kb = number_or(root, "delay_unit_kb", 80.0, "config");
    const double vnf_threshold = number_or(root, "vnf_usage_threshold", 1.0, "config");
    if (const YAML::Node s = root["solver"]) {
      require_map(s, "solver");
      only_keys(s, {"node_budget", "oracle_cap"}, "solver");
      if (s["node_budget"]) cfg.solver.node_budget = count(s["node_budget"], "solver.node_budget");
      if (s["oracle_cap"]) cfg.solver.oracle_cap = count(s["oracle_cap"], "solver.oracle_cap");
    }

    std::vector<ComputeNode> nodes;
    const YAML::Node ns = field(root, "nodes", "config");
    require_seq(ns, "nodes");
    for (const auto& n : ns) {
      require_map(n, "node");
      only_keys(n, {"id", "tier", "capacity_vcpu", "cost_per_vcpu", "usage_threshold"}, "node");
      ComputeNode c;
      c.id = text(n, "id", "node");
      const auto tier = text(n, "tier", "node");
      if (tier != "cloud" && tier != "fog") fail(n["tier"], "tier must be 'cloud' or 'fog', got '" + tier + "'");
      c.tier = tier == "cloud" ? Tier::cloud : Tier::fog;
      c.capacity_vcpu = number(n, "capacity_vcpu", "node " + c.id);
      c.cost_per_vcpu = number(n, "cost_per_vcpu", "node " + c.id);
      c.usage_threshold = number_or(n, "usage_threshold", 1.0, "node " + c.id);
      nodes.push_back(std::move(c));
    }
    const auto devices = root["devices"] ? texts(root["devices"], "devices") : std::vector<std::string>{};

    std::vector<Link> links;
    if (const YAML::Node ls = root["links"]) {
      require_seq(ls, "links");
      for (const auto& l : ls) {
        require_map(l, "link");
        only_keys(l, {"id", "a", "b", "bandwidth_mbps", "cost_per_gb", "delay_ms", "usage_threshold"}, "link");
        Link k;
        k.a = text(l, "a", "link");
        k.b = text(l, "b", "link");
        k.id = l["id"] ? text(l["id"], "link.id") : k.a + "_" + k.b;
        k.bandwidth_bits = number(l, "bandwidth_mbps", "link " + k.id) * kBitsPerMegabit;
        k.cost_per_bit = number(l, "cost_per_gb", "link " + k.id) / kBitsPerGigabit;
        k.delay_ms = number(l, "delay_ms", "link " + k.id);
        k.usage_threshold = number_or(l, "usage_threshold", 1.0, "link " + k.id);
        links.push_back(std::move(k));
      }
    }

    std::vector<VnfType> catalog;
    const YAML::Node ts = field(root, "vnf_types", "config");
    require_seq(ts, "vnf_types");
    for (const auto& t : ts) {
      require_map(t, "vnf type");
      only_keys(t,
                {"id", "license_cost", "capacity_kb", "requirement_vcpu", "instances", "delay_cloud_ms",
                 "delay_fog_ms"},
                "vnf type");
      VnfType v;
      v.id = text(t, "id", "vnf type");
      const std::string what = "vnf type " + v.id;
      v.license_cost = number(t, "license_cost", what);
      v.capacity_bits = number(t, "capacity_kb", what) * kBitsPerKilobyte;
      v.requirement_vcpu = number(t, "requirement_vcpu", what);
      const auto inst = count(field(t, "instances", what), what + ".instances");
      if (inst < 1 || inst > 1'000'000) fail(t["instances"], what + ": instances must lie in [1, 1000000]");
      v.instance_count = static_cast<int>(inst);
      v.delay_cloud_ms = number(t, "delay_cloud_ms", what);
      v.delay_fog_ms = number(t, "delay_fog_ms", what);
      catalog.push_back(std::move(v));
    }

    try {
      cfg.scenario.infra = Infrastructure(std::move(nodes), devices, std::move(links), std::move(catalog),
                                          delay_unit_kb * kBitsPerKilobyte, vnf_threshold);
    } catch (const InfrastructureError& e) {
      fail(root, e.what());
    }

    const YAML::Node rs = field(root, "requests", "config");
    require_seq(rs, "requests");
    for (const auto& r : rs) {
      require_map(r, "request");
      only_keys(r, {"id", "traffic_kb", "devices", "tree"}, "request");
      Request req;
      req.id = text(r, "id", "request");
      req.traffic_bits = number(r, "traffic_kb", "request " + req.id) * kBitsPerKilobyte;
      req.devices = texts(field(r, "devices", "request " + req.id), "request " + req.id + ".devices");
      req.tree.root = tree(field(r, "tree", "request " + req.id));
      // Per-request checks, anchored at the request.
      ValidationReport report = validate_scenario(cfg.scenario.infra, {req});
      if (!report.ok()) fail(r, report.violations.front());
      cfg.scenario.requests.push_back(std::move(req));
    }
    const auto report = validate_scenario(cfg.scenario.infra, cfg.scenario.requests);
    if (!report.ok()) fail(rs, report.violations.front());
    return cfg;
  }

 private:
  std::string source_;
};

inline void emit_tree(YAML::Emitter& out, const TreeNode& node) {
  switch (node.kind) {
    case NodeKind::leaf:
      out << node.type_id;
      return;
    case NodeKind::seq:
    case NodeKind::par:
      out << YAML::BeginMap << YAML::Key << to_string(node.kind) << YAML::Value << YAML::Flow << YAML::BeginSeq;
      for (const auto& c : node.children) emit_tree(out, c);
      out << YAML::EndSeq << YAML::EndMap;
      return;
    case NodeKind::sel:
      out << YAML::BeginMap << YAML::Key << "sel" << YAML::Value << YAML::BeginMap << YAML::Key << "p"
          << YAML::Value << YAML::Flow << YAML::BeginSeq;
      for (double p : node.probabilities) out << format_double(p);
      out << YAML::EndSeq << YAML::Key << "branches" << YAML::Value << YAML::Flow << YAML::BeginSeq;
      for (const auto& c : node.children) emit_tree(out, c);
      out << YAML::EndSeq << YAML::EndMap << YAML::EndMap;
      return;
    case NodeKind::loop:
      out << YAML::BeginMap << YAML::Key << "loop" << YAML::Value << YAML::BeginMap << YAML::Key << "q"
          << YAML::Value << format_double(node.continuation) << YAML::Key << "body" << YAML::Value << YAML::Flow
          << YAML::BeginSeq;
      for (const auto& c : node.children) emit_tree(out, c);
      out << YAML::EndSeq << YAML::EndMap << YAML::EndMap;
      return;
  }
}

}  // namespace detail

/// Parses a configuration document; `source` names it in diagnostics.
inline ScenarioConfig parse_config(const std::string& text, const std::string& source = "<config>") {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ":" + std::to_string(e.mark.column + 1) +
                      ": " + e.msg);
  }
  try {
    return detail::ConfigReader(source).read(root);
  } catch (const YAML::Exception& e) {
    throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

/// YAML text that parse_config reads back to the same scenario.
inline std::string dump_config(const ScenarioConfig& cfg) {
  const auto& infra = cfg.scenario.infra;
  const auto num = [](double v) { return format_double(v); };
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "alpha" << YAML::Value << num(cfg.alpha);
  out << YAML::Key << "delay_unit_kb" << YAML::Value << num(infra.delay_unit_bits() / kBitsPerKilobyte);
  out << YAML::Key << "vnf_usage_threshold" << YAML::Value << num(infra.vnf_usage_threshold());
  out << YAML::Key << "solver" << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key << "node_budget"
      << YAML::Value << cfg.solver.node_budget << YAML::Key << "oracle_cap" << YAML::Value << cfg.solver.oracle_cap
      << YAML::EndMap;
  out << YAML::Key << "nodes" << YAML::Value << YAML::BeginSeq;
  for (const auto& n : infra.nodes()) {
    out << YAML::Flow << YAML::BeginMap << YAML::Key << "id" << YAML::Value << n.id << YAML::Key << "tier"
        << YAML::Value << to_string(n.tier) << YAML::Key << "capacity_vcpu" << YAML::Value << num(n.capacity_vcpu)
        << YAML::Key << "cost_per_vcpu" << YAML::Value << num(n.cost_per_vcpu) << YAML::Key << "usage_threshold"
        << YAML::Value << num(n.usage_threshold) << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::Key << "devices" << YAML::Value << YAML::Flow << infra.devices();
  out << YAML::Key << "links" << YAML::Value << YAML::BeginSeq;
  for (const auto& l : infra.links()) {
    out << YAML::Flow << YAML::BeginMap << YAML::Key << "id" << YAML::Value << l.id << YAML::Key << "a"
        << YAML::Value << l.a << YAML::Key << "b" << YAML::Value << l.b << YAML::Key << "bandwidth_mbps"
        << YAML::Value << num(l.bandwidth_bits / kBitsPerMegabit) << YAML::Key << "cost_per_gb" << YAML::Value
        << num(l.cost_per_bit * kBitsPerGigabit) << YAML::Key << "delay_ms" << YAML::Value << num(l.delay_ms)
        << YAML::Key << "usage_threshold" << YAML::Value << num(l.usage_threshold) << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::Key << "vnf_types" << YAML::Value << YAML::BeginSeq;
  for (const auto& t : infra.catalog()) {
    out << YAML::Flow << YAML::BeginMap << YAML::Key << "id" << YAML::Value << t.id << YAML::Key << "license_cost"
        << YAML::Value << num(t.license_cost) << YAML::Key << "capacity_kb" << YAML::Value
        << num(t.capacity_bits / kBitsPerKilobyte) << YAML::Key << "requirement_vcpu" << YAML::Value
        << num(t.requirement_vcpu) << YAML::Key << "instances" << YAML::Value << t.instance_count << YAML::Key
        << "delay_cloud_ms" << YAML::Value << num(t.delay_cloud_ms) << YAML::Key << "delay_fog_ms" << YAML::Value
        << num(t.delay_fog_ms) << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::Key << "requests" << YAML::Value << YAML::BeginSeq;
  for (const auto& r : cfg.scenario.requests) {
    out << YAML::BeginMap << YAML::Key << "id" << YAML::Value << r.id << YAML::Key << "traffic_kb" << YAML::Value
        << num(r.traffic_bits / kBitsPerKilobyte) << YAML::Key << "devices" << YAML::Value << YAML::Flow
        << r.devices << YAML::Key << "tree" << YAML::Value;
    detail::emit_tree(out, r.tree.root);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace fogweave
