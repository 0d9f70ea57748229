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

#ifndef FAIRKM_NETFLOW_HPP_
#define FAIRKM_NETFLOW_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fairkm/core.hpp"

namespace fairkm {

/// Bipartite transport instance: sources with integer supplies, sinks with
/// integer demands, and a dense table of nonnegative arc costs.
struct TransportProblem {
  std::vector<Weight> supplies;
  std::vector<Weight> demands;
  std::vector<double> costs;             // supplies.size() x demands.size(), row-major
  std::vector<std::uint8_t> admissible;  // same shape; empty means every arc exists

  std::size_t num_sources() const { return supplies.size(); }
  std::size_t num_sinks() const { return demands.size(); }
  double cost(std::size_t s, std::size_t t) const { return costs[s * demands.size() + t]; }
  bool allowed(std::size_t s, std::size_t t) const {
    return admissible.empty() || admissible[s * demands.size() + t] != 0;
  }
};

struct Flow {
  std::size_t source = 0;
  std::size_t sink = 0;
  Weight amount = 0;
  friend bool operator==(const Flow&, const Flow&) = default;
};

struct FlowResult {
  std::vector<Flow> flows;  // sorted by (source, sink), amounts positive
  double total_cost = 0.0;
  // Dual certificate: c(s,t) + source_potentials[s] - sink_potentials[t] is
  // nonnegative on every admissible arc and zero on arcs carrying flow.
  std::vector<double> source_potentials;
  std::vector<double> sink_potentials;
};

// Minimum-cost integral flow saturating all supplies and demands, by
// successive shortest augmenting paths with node potentials. Throws
// InfeasibleError when supplies and demands differ or the admissible arcs
// cannot route them, DomainError on malformed input.
FlowResult solve_transport(const TransportProblem& problem);

// Checks flow conservation and the reduced-cost certificate with slack
// `tolerance` (scaled by the largest arc cost).
bool certify_optimal(const TransportProblem& problem, const FlowResult& result, double tolerance = 1e-9);

struct Matching {
  std::vector<std::size_t> mate;  // row -> column
  double cost = 0.0;
};

// Min-cost perfect matching on an n x n table given row-major; solved as a
// transport with unit supplies and demands.
Matching min_cost_perfect_matching(std::size_t rows, std::size_t cols, std::span<const double> costs);

}  // namespace fairkm

#endif  // FAIRKM_NETFLOW_HPP_
