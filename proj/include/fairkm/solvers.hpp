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


#ifndef FAIRKM_SOLVERS_HPP_
#define FAIRKM_SOLVERS_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "fairkm/core.hpp"
#include "fairkm/fairlets.hpp"
#include "fairkm/random.hpp"

namespace fairkm {

enum class StoppingMode {
  kCapOrTolerance,  // stop at the iteration cap or when relative improvement < tolerance
  kCapOnly,         // stop at the iteration cap or when centers stop moving
};

struct SolverConfig {
  std::size_t k = 2;
  std::size_t max_iterations = 100;
  double tolerance = 1e-6;
  std::uint64_t seed = 0;
  StoppingMode stopping = StoppingMode::kCapOrTolerance;
};

struct SeedResult {
  Centers centers;
  // Set when the data had fewer than k locations with positive mass, so some
  // centers repeat.
  bool duplicates = false;
};

// D^2 sampling on weighted points; colors are ignored. When `initial` is
// given the draw extends it to k centers.
SeedResult kmeanspp_seed(const Dataset& points, std::size_t k, Rng& rng, const Centers* initial = nullptr);
SeedResult kmeanspp_seed(const Dataset& points, std::size_t k, std::uint64_t seed);

struct LloydResult {
  Centers centers;
  double cost = 0.0;
  std::size_t iterations = 0;
  // Cost of each assignment step, followed by the cost of the final centers.
  std::vector<double> cost_history;
};

LloydResult lloyd(const Dataset& points, const Centers& init, const SolverConfig& config);

// Seed plus Lloyd.
LloydResult kmeanspp(const Dataset& points, const SolverConfig& config);

struct PhaseTimings {
  double fairlets = 0.0;
  double solve = 0.0;
  double assignment = 0.0;
};

struct FairSolveResult {
  FairClustering clustering;
  std::size_t iterations = 0;
  std::vector<double> cost_history;
  PhaseTimings timings;
};

// A decomposition may be passed to reuse fairlets across runs on one dataset.
FairSolveResult cklv_kmeanspp(const Dataset& data, const SolverConfig& config,
                              const FairletDecomposition* fairlets = nullptr);

FairSolveResult reassigned_cklv(const Dataset& data, const SolverConfig& config,
                                const FairletDecomposition* fairlets = nullptr);

// Fair Lloyd. Seeds with k-means++ on the fairlet representatives (no Lloyd
// on them) unless `init` is given.
FairSolveResult fair_kmeanspp(const Dataset& data, const SolverConfig& config,
                              const FairletDecomposition* fairlets = nullptr, const Centers* init = nullptr);

enum class PtasMode { kAuto, kExhaustive, kSampling };

struct PtasOptions {
  PtasMode mode = PtasMode::kAuto;
  std::size_t samples = 2000;  // candidate center sets in sampling mode
  std::uint64_t seed = 0;
  bool polish = true;          // fair Lloyd from the best candidate
};

// Candidate centers are centroids of k groups of ceil(2/eps) points drawn
// with repetition. Exhaustive mode enumerates every such choice and requires
// at most 14 points, k <= 2, eps >= 1.
FairSolveResult ptas(const Dataset& data, std::size_t k, double epsilon, const PtasOptions& options = {});

struct BruteForceGuard {
  Weight max_total_weight = 14;
  std::size_t max_k = 3;
};

// Exact optimum over clusterings of the unit copies into at most k exactly
// balanced clusters, each served by its centroid.
FairClustering brute_force_opt(const Dataset& data, std::size_t k, BruteForceGuard guard = {});

}  // namespace fairkm

#endif  // FAIRKM_SOLVERS_HPP_
