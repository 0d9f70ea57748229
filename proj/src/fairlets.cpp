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

#include "fairkm/fairlets.hpp"

#include "fairkm/errors.hpp"
#include "fairkm/netflow.hpp"

namespace fairkm {

FairletDecomposition compute_fairlets(const Dataset& data) {
  require_two_color_balanced(data);
  const auto reds = data.indices_of_color(kRed);
  const auto blues = data.indices_of_color(kBlue);

  TransportProblem problem;
  problem.supplies.reserve(reds.size());
  problem.demands.reserve(blues.size());
  for (auto r : reds) problem.supplies.push_back(data.weight(r));
  for (auto b : blues) problem.demands.push_back(data.weight(b));
  problem.costs.resize(reds.size() * blues.size());
  for (std::size_t i = 0; i < reds.size(); ++i) {
    const auto r = data.point(reds[i]);
    for (std::size_t j = 0; j < blues.size(); ++j) {
      problem.costs[i * blues.size() + j] = squared_distance(r, data.point(blues[j])) / 2.0;
    }
  }
  const FlowResult flow = solve_transport(problem);

  FairletDecomposition out;
  out.representatives = Dataset(data.dim(), 1);
  out.representatives.reserve(flow.flows.size());
  std::vector<double> costs;
  costs.reserve(flow.flows.size());
  for (const auto& f : flow.flows) {
    Fairlet fl;
    fl.red = reds[f.source];
    fl.blue = blues[f.sink];
    fl.weight = f.amount;
    const auto r = data.point(fl.red);
    const auto b = data.point(fl.blue);
    fl.representative.resize(data.dim());
    for (std::size_t j = 0; j < data.dim(); ++j) fl.representative[j] = 0.5 * (r[j] + b[j]);
    fl.internal_cost = static_cast<double>(fl.weight) * squared_distance(r, b) / 2.0;
    costs.push_back(fl.internal_cost);
    out.representatives.add(fl.representative, 0, fl.weight);
    out.fairlets.push_back(std::move(fl));
  }
  out.matching_cost = pairwise_sum(costs);
  return out;
}

double fairlet_lower_bound(const FairletDecomposition& decomposition) { return decomposition.matching_cost; }

FairClustering assign_fairlets(const Dataset& data, const FairletDecomposition& decomposition,
                               const Centers& centers, const std::vector<std::size_t>& representative_center) {
  if (representative_center.size() != decomposition.fairlets.size()) {
    throw DomainError("assign_fairlets: one center index per fairlet required");
  }
  Assignment assignment(data.size());
  auto add = [&](std::size_t point, std::size_t center, Weight w) {
    for (auto& part : assignment[point]) {
      if (part.center == center) {
        part.weight += w;
        return;
      }
    }
    assignment[point].push_back({center, w});
  };
  for (std::size_t f = 0; f < decomposition.fairlets.size(); ++f) {
    const auto& fl = decomposition.fairlets[f];
    const std::size_t c = representative_center[f];
    if (c >= centers.size()) throw DomainError("assign_fairlets: center index out of range");
    add(fl.red, c, fl.weight);
    add(fl.blue, c, fl.weight);
  }
  return make_clustering(data, centers, std::move(assignment));
}

}  // namespace fairkm
