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

#ifndef FAIRKM_FAIRLETS_HPP_
#define FAIRKM_FAIRLETS_HPP_

#include <cstddef>
#include <vector>

#include "fairkm/core.hpp"

namespace fairkm {

/// A red/blue pairing carrying `weight` units from each side. With weighted
/// input one point may take part in several fairlets.
struct Fairlet {
  std::size_t red = 0;   // index into the dataset
  std::size_t blue = 0;  // index into the dataset
  Weight weight = 0;
  std::vector<double> representative;  // midpoint of the two points
  double internal_cost = 0.0;          // weight * |red - blue|^2 / 2
};

struct FairletDecomposition {
  std::vector<Fairlet> fairlets;
  // One uncolored weighted point per fairlet, in the same order.
  Dataset representatives;
  // Sum of internal costs; a lower bound on the optimal fair k-means cost for
  // every k.
  double matching_cost = 0.0;
};

// Min-cost pairing of red weight to blue weight under |r - b|^2 / 2.
// Requires exactly two colors of equal total weight.
FairletDecomposition compute_fairlets(const Dataset& data);

// The decomposition's matching cost, which no fair clustering can undercut.
double fairlet_lower_bound(const FairletDecomposition& decomposition);

// Sends both sides of every fairlet to the center its representative is
// assigned to (`representative_center[f]`), merging parts per point.
FairClustering assign_fairlets(const Dataset& data, const FairletDecomposition& decomposition,
                               const Centers& centers, const std::vector<std::size_t>& representative_center);

}  // namespace fairkm

#endif  // FAIRKM_FAIRLETS_HPP_
