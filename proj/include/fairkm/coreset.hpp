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


#ifndef FAIRKM_CORESET_HPP_
#define FAIRKM_CORESET_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "fairkm/core.hpp"
#include "fairkm/fairassign.hpp"

namespace fairkm {

// Number of source rows behind a summary point and the sum of those rows.
// The rows may live in a different space than the summary (see sketch).
struct Provenance {
  Weight count = 0;
  std::vector<double> linear_sum;
  friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// Weighted colored summary produced by moving points to common places.
///
/// `movement_budget_used` is the measured sum of w * |x - pi(x)|^2 over the
/// source points (composed through recompression), and `opt_lower_bound` the
/// lower bound on the source's optimal k-means cost it is measured against.
struct FairCoreset {
  Dataset summary;
  std::size_t k = 0;
  double epsilon = 0.0;
  double movement_budget_used = 0.0;
  double opt_lower_bound = 0.0;
  double epsilon_accumulated = 0.0;
  bool within_contract = true;
  std::size_t provenance_dim = 0;
  std::vector<Provenance> provenance;  // empty, or one entry per summary point

  bool has_provenance() const { return !provenance.empty() || (summary.empty() && provenance_dim > 0); }
  friend bool operator==(const FairCoreset&, const FairCoreset&) = default;
};

struct CoresetOptions {
  std::uint64_t seed = 0;
  // Maximum number of summary points; 0 disables the cap. Meeting it may
  // break the movement contract, which is then reported.
  std::size_t size_target = 0;
  // Points drawn for the bicriteria anchors and the cost estimate.
  std::size_t sample_size = 2048;
  // Inputs with at most this many distinct locations get the larger of the
  // certified nearest-neighbour and separation bounds instead of the sampled
  // estimate.
  std::size_t certified_limit = 4096;
  // Overrides the lower bound (used when recompressing).
  std::optional<double> opt_lower_bound;
  bool track_provenance = false;
};

// Builds a coreset of `points`. Provenance, when given, has one entry per
// point and is aggregated onto the summary.
FairCoreset build_fair_coreset(const Dataset& points, std::size_t k, double epsilon, const CoresetOptions& options = {},
                               const std::vector<Provenance>* provenance = nullptr);

FairCoreset merge(const FairCoreset& a, const FairCoreset& b);

FairCoreset recompress(const FairCoreset& s, std::size_t k, double epsilon, const CoresetOptions& options = {});

// Certified lower bound on the optimal colorless k-means cost: a quarter of
// the weighted squared nearest-neighbour distances between distinct
// locations, minus the k largest terms.
double nearest_neighbor_lower_bound(const Dataset& points, std::size_t k);

// Certified lower bound from k + 1 well separated locations (farthest-first
// traversal): the cheapest pair among them that must share a cluster.
double separation_lower_bound(const Dataset& points, std::size_t k);

// Colors dropped and co-located weights merged.
Dataset colorless_projection(const Dataset& points);

/// Merge-and-reduce over fixed-size blocks.
class StreamingCoresetBuilder {
 public:
  struct Options {
    std::size_t block_size = 8192;
    CoresetOptions coreset;
  };

  StreamingCoresetBuilder(std::size_t dim, int num_colors, std::size_t k, double epsilon, Options options);
  StreamingCoresetBuilder(std::size_t dim, int num_colors, std::size_t k, double epsilon)
      : StreamingCoresetBuilder(dim, num_colors, k, epsilon, Options{}) {}

  void insert(std::span<const double> coords, Color color, Weight weight = 1,
              const Provenance* provenance = nullptr);
  void insert_all(const Dataset& points);
  // Adds an already built coreset of further data.
  void absorb(const FairCoreset& coreset);

  std::size_t points_seen() const { return seen_; }
  FairCoreset finish();

 private:
  void flush();
  void push(FairCoreset coreset, std::size_t level);
  FairCoreset reduce(const FairCoreset& merged);

  std::size_t dim_;
  int num_colors_;
  std::size_t k_;
  double epsilon_;
  Options options_;
  Dataset buffer_;
  std::vector<Provenance> buffer_provenance_;
  std::vector<std::optional<FairCoreset>> levels_;
  std::size_t seen_ = 0;
  std::size_t blocks_ = 0;
};

struct VerifyOptions {
  std::size_t random_trials = 10;
  std::size_t near_trials = 10;
  std::uint64_t seed = 0;
  EnumerationGuard guard{20, 3};
  // Explicit center sets tried in addition to the sampled ones.
  std::vector<Centers> extra_centers;
};

struct VerifyReport {
  std::size_t center_sets = 0;
  std::size_t constraints = 0;
  std::size_t violations = 0;
  double max_deviation = 0.0;
  bool passed = true;
};

// Checks costc(S, K, C) within (1 +- eps) costc(P, K, C) for every
// column-feasible K and each center set. A column of S that cannot meet K
// while P can counts as a violation.
VerifyReport verify_coreset(const Dataset& points, const FairCoreset& coreset, double epsilon,
                            const VerifyOptions& options = {});

// Binary record: header (d, l, k, eps, movement, bound, accumulated eps,
// contract flag, provenance dim), then rows. Doubles are stored by bit
// pattern, so the round trip is exact.
void write_coreset(std::ostream& out, const FairCoreset& coreset);
FairCoreset read_coreset(std::istream& in);

}  // namespace fairkm

#endif  // FAIRKM_CORESET_HPP_
