// Copyright 2026 The fairkm Authors.
//
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

#include "fairkm/netflow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <utility>

#include "fairkm/errors.hpp"

namespace fairkm {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct SinkFlow {
  std::size_t source;
  Weight amount;
};

void validate(const TransportProblem& p) {
  const std::size_t cells = p.num_sources() * p.num_sinks();
  if (p.costs.size() != cells) throw DomainError("transport cost table has wrong size");
  if (!p.admissible.empty() && p.admissible.size() != cells) {
    throw DomainError("transport admissibility mask has wrong size");
  }
  Weight supply = 0;
  Weight demand = 0;
  for (Weight s : p.supplies) {
    if (s < 0) throw DomainError("negative supply");
    supply += s;
  }
  for (Weight d : p.demands) {
    if (d < 0) throw DomainError("negative demand");
    demand += d;
  }
  for (std::size_t i = 0; i < cells; ++i) {
    if (!(p.costs[i] >= 0.0) || !std::isfinite(p.costs[i])) {
      throw DomainError("transport arc costs must be finite and nonnegative");
    }
  }
  if (supply != demand) {
    throw InfeasibleError("unbalanced transport: supply " + std::to_string(supply) + " vs demand " +
                          std::to_string(demand));
  }
}

}  // namespace

FlowResult solve_transport(const TransportProblem& problem) {
  validate(problem);
  const std::size_t num_src = problem.num_sources();
  const std::size_t num_snk = problem.num_sinks();
  const std::size_t num_nodes = num_src + num_snk;

  std::vector<Weight> supply_left = problem.supplies;
  std::vector<Weight> demand_left = problem.demands;
  std::vector<std::vector<SinkFlow>> sink_flows(num_snk);

  // Potentials: reduced cost of s->t is c(s,t) + pot[s] - pot[num_src + t].
  // Starting sink potentials at the column minimum keeps every arc nonnegative.
  std::vector<double> pot(num_nodes, 0.0);
  for (std::size_t t = 0; t < num_snk; ++t) {
    double best = kInf;
    for (std::size_t s = 0; s < num_src; ++s) {
      if (problem.allowed(s, t)) best = std::min(best, problem.cost(s, t));
    }
    pot[num_src + t] = std::isfinite(best) ? best : 0.0;
  }

  std::vector<double> dist(num_nodes, kInf);
  std::vector<std::size_t> pred(num_nodes, num_nodes);
  std::vector<std::uint8_t> settled(num_nodes, 0);
  std::vector<std::size_t> touched;
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;

  auto find_flow = [&](std::size_t t, std::size_t s) -> std::vector<SinkFlow>::iterator {
    auto& list = sink_flows[t];
    return std::find_if(list.begin(), list.end(), [s](const SinkFlow& f) { return f.source == s; });
  };

  std::size_t next_source = 0;
  while (true) {
    while (next_source < num_src && supply_left[next_source] == 0) ++next_source;
    if (next_source == num_src) break;
    const std::size_t origin = next_source;

    for (std::size_t v : touched) {
      dist[v] = kInf;
      pred[v] = num_nodes;
      settled[v] = 0;
    }
    touched.clear();
    heap = {};

    dist[origin] = 0.0;
    touched.push_back(origin);
    heap.emplace(0.0, origin);
    std::size_t target = num_nodes;
    std::vector<std::size_t> settled_order;

    while (!heap.empty()) {
      const auto [d, u] = heap.top();
      heap.pop();
      if (settled[u] || d > dist[u]) continue;
      settled[u] = 1;
      settled_order.push_back(u);
      if (u >= num_src) {
        const std::size_t t = u - num_src;
        if (demand_left[t] > 0) {
          target = u;
          break;
        }
        for (const auto& f : sink_flows[t]) {
          const std::size_t s = f.source;
          if (settled[s]) continue;
          const double reduced = std::max(0.0, pot[u] - pot[s] - problem.cost(s, t));
          const double nd = d + reduced;
          if (nd < dist[s]) {
            if (!std::isfinite(dist[s])) touched.push_back(s);
            dist[s] = nd;
            pred[s] = u;
            heap.emplace(nd, s);
          }
        }
      } else {
        for (std::size_t t = 0; t < num_snk; ++t) {
          const std::size_t v = num_src + t;
          if (settled[v] || !problem.allowed(u, t)) continue;
          const double reduced = std::max(0.0, problem.cost(u, t) + pot[u] - pot[v]);
          const double nd = d + reduced;
          if (nd < dist[v]) {
            if (!std::isfinite(dist[v])) touched.push_back(v);
            dist[v] = nd;
            pred[v] = u;
            heap.emplace(nd, v);
          }
        }
      }
    }
    if (target == num_nodes) {
      throw InfeasibleError("transport has no admissible route for source " + std::to_string(origin));
    }

    const double reach = dist[target];
    for (std::size_t v : settled_order) pot[v] += dist[v] - reach;

    // Bottleneck along the path; backward arcs are limited by their flow.
    Weight delta = std::min(supply_left[origin], demand_left[target - num_src]);
    for (std::size_t v = target; v != origin; v = pred[v]) {
      const std::size_t u = pred[v];
      if (u >= num_src) delta = std::min(delta, find_flow(u - num_src, v)->amount);
    }
    for (std::size_t v = target; v != origin; v = pred[v]) {
      const std::size_t u = pred[v];
      if (u < num_src) {
        const std::size_t t = v - num_src;
        auto it = find_flow(t, u);
        if (it == sink_flows[t].end()) {
          sink_flows[t].push_back({u, delta});
        } else {
          it->amount += delta;
        }
      } else {
        const std::size_t t = u - num_src;
        auto it = find_flow(t, v);
        it->amount -= delta;
        if (it->amount == 0) sink_flows[t].erase(it);
      }
    }
    supply_left[origin] -= delta;
    demand_left[target - num_src] -= delta;
  }

  FlowResult result;
  for (std::size_t t = 0; t < num_snk; ++t) {
    for (const auto& f : sink_flows[t]) result.flows.push_back({f.source, t, f.amount});
  }
  std::sort(result.flows.begin(), result.flows.end(), [](const Flow& a, const Flow& b) {
    return a.source != b.source ? a.source < b.source : a.sink < b.sink;
  });
  std::vector<double> terms;
  terms.reserve(result.flows.size());
  for (const auto& f : result.flows) terms.push_back(static_cast<double>(f.amount) * problem.cost(f.source, f.sink));
  result.total_cost = pairwise_sum(terms);
  result.source_potentials.assign(pot.begin(), pot.begin() + static_cast<std::ptrdiff_t>(num_src));
  result.sink_potentials.assign(pot.begin() + static_cast<std::ptrdiff_t>(num_src), pot.end());
  return result;
}

bool certify_optimal(const TransportProblem& problem, const FlowResult& result, double tolerance) {
  const std::size_t num_src = problem.num_sources();
  const std::size_t num_snk = problem.num_sinks();
  if (result.source_potentials.size() != num_src || result.sink_potentials.size() != num_snk) return false;
  std::vector<Weight> out(num_src, 0);
  std::vector<Weight> in(num_snk, 0);
  for (const auto& f : result.flows) {
    if (f.source >= num_src || f.sink >= num_snk || f.amount <= 0) return false;
    if (!problem.allowed(f.source, f.sink)) return false;
    out[f.source] += f.amount;
    in[f.sink] += f.amount;
  }
  if (out != problem.supplies || in != problem.demands) return false;

  double scale = 1.0;
  for (double c : problem.costs) scale = std::max(scale, c);
  const double slack = tolerance * scale;
  auto reduced = [&](std::size_t s, std::size_t t) {
    return problem.cost(s, t) + result.source_potentials[s] - result.sink_potentials[t];
  };
  for (std::size_t s = 0; s < num_src; ++s) {
    for (std::size_t t = 0; t < num_snk; ++t) {
      if (problem.allowed(s, t) && reduced(s, t) < -slack) return false;
    }
  }
  for (const auto& f : result.flows) {
    if (std::abs(reduced(f.source, f.sink)) > slack) return false;
  }
  return true;
}

Matching min_cost_perfect_matching(std::size_t rows, std::size_t cols, std::span<const double> costs) {
  if (rows != cols) throw DomainError("perfect matching needs a square cost table");
  if (costs.size() != rows * cols) throw DomainError("matching cost table has wrong size");
  TransportProblem problem;
  problem.supplies.assign(rows, 1);
  problem.demands.assign(cols, 1);
  problem.costs.assign(costs.begin(), costs.end());
  const FlowResult flow = solve_transport(problem);
  Matching m;
  m.mate.assign(rows, 0);
  for (const auto& f : flow.flows) m.mate[f.source] = f.sink;
  m.cost = flow.total_cost;
  return m;
}

}  // namespace fairkm
