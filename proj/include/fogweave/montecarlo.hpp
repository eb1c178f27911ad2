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

/// \file montecarlo.hpp
///
/// Stochastic executions of a placed request: selections draw one branch,
/// loops repeat their body a geometric number of times. Sample means are
/// compared against the analytic folds of evaluation.hpp.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fogweave/app_model.hpp"
#include "fogweave/evaluation.hpp"
#include "fogweave/infra_model.hpp"
#include "fogweave/parallel.hpp"
#include "fogweave/rng.hpp"

namespace fogweave {

/// Iteration cap of one loop execution in a sampled trace.
inline constexpr std::uint64_t kMaxLoopIterations = 10'000;
/// Below this many samples the report carries no PASS/FAIL assertions.
inline constexpr std::size_t kMinSamplesForAssertions = 1'000;

struct ExecutionTrace {
  std::vector<std::uint64_t> visits;  // per leaf
  double makespan = 0.0;
  double cost = 0.0;  // processing + communication, licenses excluded
  std::uint64_t truncated_loops = 0;
};

namespace detail {

class TraceSampler {
 public:
  TraceSampler(const Placement& placement, std::size_t r, const Request& req, const Infrastructure& infra,
               const RequestProfile& profile)
      : req_(req) {
    const auto& slots = placement.assignments.at(r);
    const std::size_t n = profile.leaves.size();
    leaf_cost_.resize(n);
    leaf_proc_.resize(n);
    leaf_com_.resize(n);
    for (std::size_t l = 0; l < n; ++l) {
      const Assignment& a = slot(slots, l, req);
      const auto& type = infra.catalog()[profile.leaf_type[l]];
      const auto& node = infra.nodes()[a.node];
      leaf_cost_[l] = node.cost_per_vcpu * type.requirement_vcpu;
      leaf_proc_[l] = profile.delay_units * processing_delay(type, node);
      if (auto p = profile.leaves[l].predecessor) {
        const Assignment& b = slot(slots, *p, req);
        if (a.node != b.node) {
          const Link& link = route(infra, a.node, b.node, req);
          leaf_cost_[l] += profile.traffic_bits * link.cost_per_bit;
          leaf_com_[l] = profile.delay_units * link.delay_ms;
        }
      }
    }
    const Assignment& first = slot(slots, Request::first_vnf(), req);
    for (std::size_t d : profile.devices) {
      const Link& link = device_route(infra, d, first.node, req);
      device_cost_ += profile.traffic_bits * link.cost_per_bit;
      device_time_ += profile.delay_units * link.delay_ms;
    }
  }

  ExecutionTrace sample(std::uint64_t seed) {
    SplitMix64 rng(seed);
    ExecutionTrace t;
    t.visits.assign(leaf_cost_.size(), 0);
    std::size_t next = 0;
    const auto [proc, com] = walk(req_.tree.root, rng, t, next, true);
    t.makespan = proc + com + device_time_;
    t.cost += device_cost_;
    return t;
  }

 private:
  // Returns (processing, communication) time of one execution of `node`.
  // `live` is false while skipping the leaves of branches not taken, so
  // that leaf numbering stays aligned.
  std::pair<double, double> walk(const TreeNode& node, SplitMix64& rng, ExecutionTrace& t,
                                 std::size_t& next, bool live) {
    if (node.kind == NodeKind::leaf) {
      const std::size_t l = next++;
      if (!live) return {0.0, 0.0};
      ++t.visits[l];
      t.cost += leaf_cost_[l];
      return {leaf_proc_[l], leaf_com_[l]};
    }
    double p = 0.0;
    double c = 0.0;
    switch (node.kind) {
      case NodeKind::seq:
        for (const auto& ch : node.children) {
          const auto [cp, cc] = walk(ch, rng, t, next, live);
          p += cp;
          c += cc;
        }
        break;
      case NodeKind::par:
        for (const auto& ch : node.children) {
          const auto [cp, cc] = walk(ch, rng, t, next, live);
          p = std::max(p, cp);
          c = std::max(c, cc);
        }
        break;
      case NodeKind::sel: {
        std::size_t pick = node.children.size() - 1;
        if (live) {
          double u = rng.uniform01();
          for (std::size_t i = 0; i + 1 < node.children.size(); ++i) {
            if (u < node.probabilities[i]) {
              pick = i;
              break;
            }
            u -= node.probabilities[i];
          }
        }
        for (std::size_t i = 0; i < node.children.size(); ++i) {
          const auto [cp, cc] = walk(node.children[i], rng, t, next, live && i == pick);
          p += cp;
          c += cc;
        }
        break;
      }
      case NodeKind::loop: {
        std::uint64_t iterations = 0;
        if (live) {
          while (rng.bernoulli(node.continuation)) {
            if (++iterations == kMaxLoopIterations) {
              ++t.truncated_loops;
              break;
            }
          }
        }
        const std::size_t body = next;
        for (std::uint64_t k = 0; k < std::max<std::uint64_t>(iterations, 1); ++k) {
          next = body;
          for (const auto& ch : node.children) {
            const auto [cp, cc] = walk(ch, rng, t, next, live && iterations > 0);
            p += cp;
            c += cc;
          }
        }
        break;
      }
      case NodeKind::leaf:
        break;
    }
    return {p, c};
  }

  const Request& req_;
  std::vector<double> leaf_cost_;
  std::vector<double> leaf_proc_;
  std::vector<double> leaf_com_;
  double device_cost_ = 0.0;
  double device_time_ = 0.0;
};

/// Count, mean and centred second moment; merged in a fixed order.
struct Moments {
  double n = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    n += 1.0;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }

  void merge(const Moments& o) {
    if (o.n == 0.0) return;
    const double total = n + o.n;
    const double d = o.mean - mean;
    mean += d * o.n / total;
    m2 += o.m2 + d * d * n * o.n / total;
    n = total;
  }

  double stderr_of_mean() const { return n > 1.0 ? std::sqrt(m2 / (n - 1.0) / n) : 0.0; }
};

inline bool stochastic(const TreeNode& node) {
  if (node.kind == NodeKind::sel) return true;
  if (node.kind == NodeKind::loop && node.continuation > 0.0) return true;
  return std::any_of(node.children.begin(), node.children.end(), [](const TreeNode& c) { return stochastic(c); });
}

inline bool has_stochastic_par(const TreeNode& node) {
  if (node.kind == NodeKind::par && stochastic(node)) return true;
  return std::any_of(node.children.begin(), node.children.end(),
                     [](const TreeNode& c) { return has_stochastic_par(c); });
}

}  // namespace detail

/// One stochastic execution of request `r` under `placement`.
inline ExecutionTrace sample_execution(const Placement& placement, std::size_t r, const Request& req,
                                       const Infrastructure& infra, std::uint64_t seed) {
  const auto profile = RequestProfile::of(req, infra);
  return detail::TraceSampler(placement, r, req, infra, profile).sample(seed);
}

struct Estimate {
  std::string name;
  double analytic = 0.0;
  double mean = 0.0;
  double stderr_mean = 0.0;

  double deviation() const { return mean - analytic; }
  bool within(double k) const {
    return std::abs(deviation()) <= k * stderr_mean + 1e-9 * std::max(1.0, std::abs(analytic));
  }
};

enum class Check { skipped, pass, fail };

inline const char* to_string(Check c) {
  switch (c) {
    case Check::skipped: return "SKIPPED";
    case Check::pass: return "PASS";
    case Check::fail: return "FAIL";
  }
  return "?";
}

struct MonteCarloReport {
  std::string request;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  Estimate cost;
  Estimate makespan;
  std::vector<Estimate> visits;
  /// Every parallel block has deterministic branches, so the makespan fold
  /// is exact in expectation; otherwise it is only a lower bound.
  bool makespan_exact = true;
  std::uint64_t truncated_loops = 0;
  Check cost_check = Check::skipped;
  Check makespan_check = Check::skipped;
  Check visits_check = Check::skipped;

  bool assertions_applied() const { return samples >= kMinSamplesForAssertions; }
  bool passed() const {
    return cost_check != Check::fail && makespan_check != Check::fail && visits_check != Check::fail;
  }
};

inline constexpr std::size_t kSamplesPerChunk = 4096;

/// Sample means of cost, makespan and leaf visit counts of request `r`
/// against the analytic expectations (licenses are excluded from cost, as
/// they do not depend on the execution path).
inline MonteCarloReport compare_to_analytic(const Placement& placement, std::size_t r,
                                            const Request& req, const Infrastructure& infra,
                                            std::size_t samples, std::uint64_t seed,
                                            unsigned threads = 0) {
  const auto profile = RequestProfile::of(req, infra);
  const std::size_t leaves = profile.leaves.size();
  const std::size_t chunks = (samples + kSamplesPerChunk - 1) / kSamplesPerChunk;
  struct Chunk {
    detail::Moments cost, makespan;
    std::vector<detail::Moments> visits;
    std::uint64_t truncated = 0;
  };
  std::vector<Chunk> parts(chunks);
  parallel_for(0, chunks, worker_count(threads), [&](std::size_t k) {
    detail::TraceSampler sampler(placement, r, req, infra, profile);
    Chunk& c = parts[k];
    c.visits.resize(leaves);
    const std::size_t end = std::min(samples, (k + 1) * kSamplesPerChunk);
    for (std::size_t i = k * kSamplesPerChunk; i < end; ++i) {
      const auto t = sampler.sample(derive_seed(seed, i));
      c.cost.add(t.cost);
      c.makespan.add(t.makespan);
      for (std::size_t l = 0; l < leaves; ++l) c.visits[l].add(static_cast<double>(t.visits[l]));
      c.truncated += t.truncated_loops;
    }
  });

  detail::Moments cost, makespan;
  std::vector<detail::Moments> visits(leaves);
  MonteCarloReport rep;
  for (const auto& c : parts) {
    cost.merge(c.cost);
    makespan.merge(c.makespan);
    for (std::size_t l = 0; l < leaves; ++l) visits[l].merge(c.visits[l]);
    rep.truncated_loops += c.truncated;
  }

  const auto c = cost_of(placement, r, req, infra, profile);
  const auto m = makespan_of(placement, r, req, infra, profile);
  rep.request = req.id;
  rep.samples = samples;
  rep.seed = seed;
  rep.cost = {"cost", c.processing + c.communication, cost.mean, cost.stderr_of_mean()};
  rep.makespan = {"makespan", m.total, makespan.mean, makespan.stderr_of_mean()};
  for (std::size_t l = 0; l < leaves; ++l) {
    rep.visits.push_back({"visits." + profile.leaves[l].type_id, profile.leaves[l].node_weight, visits[l].mean,
                          visits[l].stderr_of_mean()});
  }
  rep.makespan_exact = !detail::has_stochastic_par(req.tree.root);

  if (rep.assertions_applied()) {
    constexpr double k = 3.0;
    const auto check = [](bool ok) { return ok ? Check::pass : Check::fail; };
    rep.cost_check = check(rep.cost.within(k));
    rep.makespan_check = check(rep.makespan_exact ? rep.makespan.within(k)
                                                  : rep.makespan.analytic <= rep.makespan.mean +
                                                                                 k * rep.makespan.stderr_mean);
    rep.visits_check = check(std::all_of(rep.visits.begin(), rep.visits.end(),
                                         [](const Estimate& e) { return e.within(k); }));
  }
  return rep;
}

}  // namespace fogweave
