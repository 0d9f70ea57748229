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


#ifndef FAIRKM_SKETCH_HPP_
#define FAIRKM_SKETCH_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "fairkm/core.hpp"
#include "fairkm/coreset.hpp"

namespace fairkm {

/// d x m scaled Rademacher matrix. Entry (row, col) is +-1/sqrt(m) from a
/// counter-based hash of (seed, row, col); small matrices are cached.
class Projection {
 public:
  Projection(std::size_t d, std::size_t m, std::uint64_t seed);

  std::size_t input_dim() const { return d_; }
  std::size_t output_dim() const { return m_; }
  std::uint64_t seed() const { return seed_; }

  double entry(std::size_t row, std::size_t col) const;
  // out = x^T S.
  void apply(std::span<const double> x, std::span<double> out) const;
  std::vector<double> apply(std::span<const double> x) const;

 private:
  std::size_t d_;
  std::size_t m_;
  std::uint64_t seed_;
  double scale_;
  std::vector<double> cache_;
};

Projection make_projection(std::size_t d, std::size_t m, std::uint64_t seed);

// ceil(4k / eps^2).
std::size_t default_sketch_dimension(std::size_t k, double epsilon);

/// Streaming coreset of projected rows, with the count and linear sum of the
/// original rows behind each summary point.
class SketchState {
 public:
  SketchState(std::size_t d, int num_colors, std::size_t k, double epsilon, std::size_t m, std::uint64_t seed,
              StreamingCoresetBuilder::Options options = {});

  void insert(std::span<const double> row, Color color);
  void insert_all(const Dataset& rows);

  std::size_t rows_seen() const { return rows_; }
  const Projection& projection() const { return projection_; }

  // Current summary over the projected space; provenance is d-dimensional.
  FairCoreset summary();

 private:
  Projection projection_;
  StreamingCoresetBuilder builder_;
  std::size_t rows_ = 0;
  std::vector<double> scratch_;
};

// Each center is the mean of the original rows behind the summary points of
// its cluster. A summary point split across clusters contributes
// proportionally to the sub-weights.
Centers recover_centers(const FairCoreset& sketch, const FairClustering& clustering);

struct SketchRecord {
  std::uint64_t seed = 0;
  std::size_t m = 0;
  FairCoreset coreset;
  friend bool operator==(const SketchRecord&, const SketchRecord&) = default;
};

// Coreset record prefixed by a sketch header (seed, m).
void write_sketch(std::ostream& out, const SketchRecord& record);
SketchRecord read_sketch(std::istream& in);

}  // namespace fairkm

#endif  // FAIRKM_SKETCH_HPP_
