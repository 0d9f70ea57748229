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

#ifndef FAIRKM_CORE_HPP_
#define FAIRKM_CORE_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fairkm/rational.hpp"

namespace fairkm {

using Weight = std::int64_t;
// Colors are 0-based labels in [0, num_colors). Two-color routines treat
// color 0 as "red" and color 1 as "blue".
using Color = int;

inline constexpr Color kRed = 0;
inline constexpr Color kBlue = 1;

struct ColoredPoint {
  std::vector<double> coords;
  Color color = 0;
  Weight weight = 1;
};

/// Weighted, colored point set with a fixed dimension and color count.
///
/// Coordinates are stored row-major in one buffer. Weights are positive
/// integer multiplicities; fractional weights cannot be represented.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::size_t dim, int num_colors);

  static Dataset from_points(std::span<const ColoredPoint> points, int num_colors);

  void add(std::span<const double> coords, Color color, Weight weight = 1);
  void reserve(std::size_t n);

  std::size_t size() const { return weights_.size(); }
  bool empty() const { return weights_.empty(); }
  std::size_t dim() const { return dim_; }
  int num_colors() const { return num_colors_; }
  Weight total_weight() const { return total_weight_; }
  Weight color_weight(Color c) const;

  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  Color color(std::size_t i) const { return colors_[i]; }
  Weight weight(std::size_t i) const { return weights_[i]; }

  const std::vector<double>& coords() const { return coords_; }
  const std::vector<Color>& colors() const { return colors_; }
  const std::vector<Weight>& weights() const { return weights_; }

  // Points of one color, in their original order.
  std::vector<std::size_t> indices_of_color(Color c) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::size_t dim_ = 0;
  int num_colors_ = 0;
  std::vector<double> coords_;
  std::vector<Color> colors_;
  std::vector<Weight> weights_;
  std::vector<Weight> color_weights_;
  Weight total_weight_ = 0;
};

/// k centers in R^d, row-major.
class Centers {
 public:
  Centers() = default;
  explicit Centers(std::size_t dim) : dim_(dim) {}
  Centers(std::size_t dim, std::vector<double> data);

  void add(std::span<const double> center);
  std::size_t size() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
  std::size_t dim() const { return dim_; }
  std::span<const double> operator[](std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  std::span<double> mutable_center(std::size_t i) { return {data_.data() + i * dim_, dim_}; }
  const std::vector<double>& data() const { return data_; }

  friend bool operator==(const Centers&, const Centers&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

/// Dense row-major integer matrix, used for k x l color counts and
/// coloring constraints.
class CountMatrix {
 public:
  CountMatrix() = default;
  CountMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0) {}
  CountMatrix(std::size_t rows, std::size_t cols, std::vector<Weight> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Weight& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  Weight at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  Weight row_sum(std::size_t r) const;
  Weight col_sum(std::size_t c) const;
  const std::vector<Weight>& data() const { return data_; }

  friend bool operator==(const CountMatrix&, const CountMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Weight> data_;
};

struct AssignmentPart {
  std::size_t center = 0;
  Weight weight = 0;
  friend bool operator==(const AssignmentPart&, const AssignmentPart&) = default;
};

// Per point, the list of (center, sub-weight) pieces its weight is split into.
using Assignment = std::vector<std::vector<AssignmentPart>>;

/// Centers plus a (possibly weight-splitting) assignment of every point.
struct FairClustering {
  Centers centers;
  Assignment assignment;
  double cost = 0.0;
  CountMatrix color_counts;  // k x l
};

// Builds a clustering, validating the assignment against the dataset
// (sub-weights positive and summing to each point's weight) and filling in
// cost and color counts.
FairClustering make_clustering(const Dataset& data, Centers centers, Assignment assignment);

double squared_distance(std::span<const double> a, std::span<const double> b);

// Sum of a sequence by recursive halving; error grows with log(n).
double pairwise_sum(std::span<const double> terms);

struct NearestCenter {
  std::size_t index = 0;
  double distance = 0.0;  // squared
};
// Ties go to the lowest index.
NearestCenter nearest_center(std::span<const double> p, const Centers& centers);

std::vector<double> centroid(const Dataset& points);
// Weighted mean of selected points with explicit weights.
std::vector<double> centroid(const Dataset& points, std::span<const std::size_t> indices,
                             std::span<const Weight> weights);

double kmeans_cost(const Dataset& data, const Centers& centers);
double assignment_cost(const Dataset& data, const FairClustering& clustering);

// Removes centers that receive no weight, renumbering the assignment.
FairClustering drop_empty_clusters(const Dataset& data, const FairClustering& clustering);

// Nearest-center clustering, the unconstrained optimum for fixed centers.
FairClustering nearest_assignment(const Dataset& data, const Centers& centers);

// Fraction of the total weight carried by color j.
Rational xi(const Dataset& data, Color j);

struct FairnessCheck {
  bool fair = true;
  // First (cluster, color) pair violating a bound, in row-major order.
  std::optional<std::pair<std::size_t, Color>> violation;
};

// (alpha, beta)-fairness of every cluster, evaluated exactly. Clusters with
// zero weight are reported as violating (with color 0).
FairnessCheck check_fair(const FairClustering& clustering, const Dataset& data, Rational alpha,
                         Rational beta);
FairnessCheck check_fair(const CountMatrix& counts, const Dataset& data, Rational alpha,
                         Rational beta);

// min(r/b, b/r); zero when either count is zero.
Rational balance(Weight red, Weight blue);

// Color-weight matrix of an assignment (k x l).
CountMatrix color_counts(const Dataset& data, const Assignment& assignment, std::size_t k);

// Throws BalanceError / UnsupportedError unless data has exactly two colors
// of equal total weight.
void require_two_color_balanced(const Dataset& data);

}  // namespace fairkm

#endif  // FAIRKM_CORE_HPP_
