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

#ifndef FAIRKM_FAIRASSIGN_HPP_
#define FAIRKM_FAIRASSIGN_HPP_

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "fairkm/core.hpp"

namespace fairkm {

// k x l matrix: entry (i, j) is the weight of color j that center i receives.
using ColoringConstraint = CountMatrix;

struct ConstrainedAssignment {
  double cost = 0.0;
  Assignment assignment;
};

// Minimum cost over assignments meeting K exactly (weights may be split).
// Colors are independent given K, so this solves one transport per color.
// Returns nullopt, the infinite cost, when a column of K does not sum to the
// weight of its color.
std::optional<ConstrainedAssignment> color_constrained_cost(const Dataset& data, const ColoringConstraint& K,
                                                            const Centers& centers);

// One color's share of color_constrained_cost: points of `color` sent to
// centers with the given per-center demands. nullopt when the demands do not
// sum to the color weight.
std::optional<double> color_transport_cost(const Dataset& data, Color color, std::span<const Weight> demands,
                                           const Centers& centers);

/// Optimal exactly balanced assignment of a two-color dataset to fixed
/// centers: every center receives equal red and blue weight.
///
/// Solved as a min-cost flow red -> center -> blue whose paths are the
/// (red, blue, center) triples of the pair-matching formulation; the flow
/// only has O(n k) arcs and the shortest-path search runs over the k center
/// nodes.
FairClustering fair_assignment(const Dataset& data, const Centers& centers);

// Same optimum through the complete red x blue matching with pair cost
// min_c |r-c|^2 + |b-c|^2 (ties to the lower center index). Quadratic in the
// number of points; kept as the reference route.
FairClustering fair_assignment_by_matching(const Dataset& data, const Centers& centers);

struct EnumerationGuard {
  Weight max_total_weight = 16;
  std::size_t max_k = 3;
};

// Calls `visit` for every K with column sums equal to the color weights and
// rows obeying alpha*xi(j) <= K_ij / |row i| <= beta*xi(j). Rows summing to
// zero are skipped unless allow_empty_clusters is set. Throws GuardError
// beyond the guard.
void for_each_fairness_constraint(const Dataset& data, std::size_t k, Rational alpha, Rational beta,
                                  const std::function<void(const ColoringConstraint&)>& visit,
                                  bool allow_empty_clusters = false, EnumerationGuard guard = {});

std::vector<ColoringConstraint> fairness_constraints_cover(const Dataset& data, std::size_t k, Rational alpha,
                                                           Rational beta, bool allow_empty_clusters = false,
                                                           EnumerationGuard guard = {});

// Every column-feasible K, empty rows included.
void for_each_coloring_constraint(const Dataset& data, std::size_t k,
                                  const std::function<void(const ColoringConstraint&)>& visit,
                                  EnumerationGuard guard = {});

// All ways to write `total` as an ordered sum of `parts` nonnegative integers.
std::vector<std::vector<Weight>> compositions(Weight total, std::size_t parts);

}  // namespace fairkm

#endif  // FAIRKM_FAIRASSIGN_HPP_
