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

#include "fairkm/core.hpp"

#include <cmath>
#include <string>

#include "fairkm/errors.hpp"

namespace fairkm {

Dataset::Dataset(std::size_t dim, int num_colors)
    : dim_(dim), num_colors_(num_colors), color_weights_(static_cast<std::size_t>(num_colors), 0) {
  if (dim == 0) throw DomainError("dataset dimension must be positive");
  if (num_colors < 1) throw DomainError("dataset needs at least one color");
}

Dataset Dataset::from_points(std::span<const ColoredPoint> points, int num_colors) {
  if (points.empty()) throw DomainError("from_points: no points (dimension unknown)");
  Dataset data(points.front().coords.size(), num_colors);
  data.reserve(points.size());
  for (const auto& p : points) data.add(p.coords, p.color, p.weight);
  return data;
}

void Dataset::add(std::span<const double> coords, Color color, Weight weight) {
  if (coords.size() != dim_) {
    throw DomainError("point has dimension " + std::to_string(coords.size()) + ", dataset has " +
                      std::to_string(dim_));
  }
  if (color < 0 || color >= num_colors_) throw DomainError("color label out of range");
  if (weight < 1) throw DomainError("point weights must be positive integers");
  coords_.insert(coords_.end(), coords.begin(), coords.end());
  colors_.push_back(color);
  weights_.push_back(weight);
  color_weights_[static_cast<std::size_t>(color)] += weight;
  total_weight_ += weight;
}

void Dataset::reserve(std::size_t n) {
  coords_.reserve(n * dim_);
  colors_.reserve(n);
  weights_.reserve(n);
}

Weight Dataset::color_weight(Color c) const {
  if (c < 0 || c >= num_colors_) throw DomainError("color label out of range");
  return color_weights_[static_cast<std::size_t>(c)];
}

std::vector<std::size_t> Dataset::indices_of_color(Color c) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < size(); ++i) {
    if (colors_[i] == c) out.push_back(i);
  }
  return out;
}

Centers::Centers(std::size_t dim, std::vector<double> data) : dim_(dim), data_(std::move(data)) {
  if (dim == 0 || data_.size() % dim != 0) throw DomainError("center buffer is not a multiple of the dimension");
}

void Centers::add(std::span<const double> center) {
  if (center.size() != dim_) throw DomainError("center dimension mismatch");
  data_.insert(data_.end(), center.begin(), center.end());
}

CountMatrix::CountMatrix(std::size_t rows, std::size_t cols, std::vector<Weight> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) throw DomainError("count matrix size mismatch");
}

Weight CountMatrix::row_sum(std::size_t r) const {
  Weight s = 0;
  for (std::size_t c = 0; c < cols_; ++c) s += at(r, c);
  return s;
}

Weight CountMatrix::col_sum(std::size_t c) const {
  Weight s = 0;
  for (std::size_t r = 0; r < rows_; ++r) s += at(r, c);
  return s;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double pairwise_sum(std::span<const double> terms) {
  constexpr std::size_t kBlock = 32;
  if (terms.size() <= kBlock) {
    double s = 0.0;
    for (double t : terms) s += t;
    return s;
  }
  const std::size_t half = terms.size() / 2;
  return pairwise_sum(terms.first(half)) + pairwise_sum(terms.subspan(half));
}

NearestCenter nearest_center(std::span<const double> p, const Centers& centers) {
  if (centers.size() == 0) throw DomainError("empty center set");
  NearestCenter best{0, squared_distance(p, centers[0])};
  for (std::size_t i = 1; i < centers.size(); ++i) {
    const double d = squared_distance(p, centers[i]);
    if (d < best.distance) best = {i, d};
  }
  return best;
}

std::vector<double> centroid(const Dataset& points) {
  if (points.empty()) throw DomainError("centroid of an empty point list");
  std::vector<std::size_t> idx(points.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  return centroid(points, idx, points.weights());
}

std::vector<double> centroid(const Dataset& points, std::span<const std::size_t> indices,
                             std::span<const Weight> weights) {
  if (indices.empty()) throw DomainError("centroid of an empty point list");
  if (indices.size() != weights.size()) throw DomainError("centroid: index/weight length mismatch");
  const std::size_t d = points.dim();
  std::vector<double> mean(d, 0.0);
  Weight total = 0;
  for (std::size_t a = 0; a < indices.size(); ++a) {
    const auto p = points.point(indices[a]);
    const double w = static_cast<double>(weights[a]);
    for (std::size_t j = 0; j < d; ++j) mean[j] += w * p[j];
    total += weights[a];
  }
  if (total < 1) throw DomainError("centroid: total weight must be positive");
  for (double& m : mean) m /= static_cast<double>(total);
  return mean;
}

double kmeans_cost(const Dataset& data, const Centers& centers) {
  if (centers.size() == 0) throw DomainError("kmeans_cost: empty center set");
  if (centers.dim() != data.dim()) throw DomainError("kmeans_cost: dimension mismatch");
  std::vector<double> terms(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    terms[i] = static_cast<double>(data.weight(i)) * nearest_center(data.point(i), centers).distance;
  }
  return pairwise_sum(terms);
}

double assignment_cost(const Dataset& data, const FairClustering& clustering) {
  if (clustering.assignment.size() != data.size()) throw DomainError("assignment_cost: assignment length mismatch");
  const auto& centers = clustering.centers;
  std::vector<double> terms;
  terms.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (const auto& part : clustering.assignment[i]) {
      if (part.center >= centers.size()) throw DomainError("assignment references an out-of-range center");
      terms.push_back(static_cast<double>(part.weight) * squared_distance(data.point(i), centers[part.center]));
    }
  }
  return pairwise_sum(terms);
}

CountMatrix color_counts(const Dataset& data, const Assignment& assignment, std::size_t k) {
  CountMatrix counts(k, static_cast<std::size_t>(data.num_colors()));
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    for (const auto& part : assignment[i]) {
      if (part.center >= k) throw DomainError("assignment references an out-of-range center");
      counts.at(part.center, static_cast<std::size_t>(data.color(i))) += part.weight;
    }
  }
  return counts;
}

FairClustering make_clustering(const Dataset& data, Centers centers, Assignment assignment) {
  if (assignment.size() != data.size()) throw DomainError("assignment length differs from dataset size");
  for (std::size_t i = 0; i < data.size(); ++i) {
    Weight total = 0;
    for (const auto& part : assignment[i]) {
      if (part.weight < 1) throw DomainError("assignment sub-weights must be positive");
      total += part.weight;
    }
    if (total != data.weight(i)) throw DomainError("assignment does not cover point weight");
  }
  FairClustering out;
  out.centers = std::move(centers);
  out.assignment = std::move(assignment);
  out.color_counts = color_counts(data, out.assignment, out.centers.size());
  out.cost = assignment_cost(data, out);
  return out;
}

FairClustering nearest_assignment(const Dataset& data, const Centers& centers) {
  Assignment assignment(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    assignment[i].push_back({nearest_center(data.point(i), centers).index, data.weight(i)});
  }
  return make_clustering(data, centers, std::move(assignment));
}

FairClustering drop_empty_clusters(const Dataset& data, const FairClustering& clustering) {
  const std::size_t k = clustering.centers.size();
  std::vector<std::size_t> remap(k, k);
  Centers kept(clustering.centers.dim());
  for (std::size_t i = 0; i < k; ++i) {
    if (clustering.color_counts.row_sum(i) > 0) {
      remap[i] = kept.size();
      kept.add(clustering.centers[i]);
    }
  }
  if (kept.size() == k) return clustering;
  Assignment assignment = clustering.assignment;
  for (auto& parts : assignment) {
    for (auto& part : parts) part.center = remap[part.center];
  }
  return make_clustering(data, std::move(kept), std::move(assignment));
}

Rational xi(const Dataset& data, Color j) {
  if (data.total_weight() == 0) throw DomainError("xi of an empty dataset");
  return Rational(data.color_weight(j), data.total_weight());
}

FairnessCheck check_fair(const CountMatrix& counts, const Dataset& data, Rational alpha, Rational beta) {
  FairnessCheck result;
  const __int128 total = data.total_weight();
  for (std::size_t i = 0; i < counts.rows(); ++i) {
    const __int128 cluster = counts.row_sum(i);
    if (cluster == 0) {
      result.fair = false;
      result.violation = {{i, 0}};
      return result;
    }
    for (std::size_t j = 0; j < counts.cols(); ++j) {
      // alpha * W_j / W <= K_ij / S_i <= beta * W_j / W, cross-multiplied.
      const __int128 share = static_cast<__int128>(counts.at(i, j)) * total;
      const __int128 global = static_cast<__int128>(data.color_weight(static_cast<Color>(j))) * cluster;
      const bool low_ok = static_cast<__int128>(alpha.num()) * global <= share * alpha.den();
      const bool high_ok = share * beta.den() <= static_cast<__int128>(beta.num()) * global;
      if (!low_ok || !high_ok) {
        result.fair = false;
        result.violation = {{i, static_cast<Color>(j)}};
        return result;
      }
    }
  }
  return result;
}

FairnessCheck check_fair(const FairClustering& clustering, const Dataset& data, Rational alpha,
                         Rational beta) {
  return check_fair(clustering.color_counts, data, alpha, beta);
}

Rational balance(Weight red, Weight blue) {
  if (red <= 0 || blue <= 0) return Rational(0);
  return red <= blue ? Rational(red, blue) : Rational(blue, red);
}

void require_two_color_balanced(const Dataset& data) {
  if (data.num_colors() != 2) throw UnsupportedError("algorithm requires exactly two colors");
  if (data.color_weight(kRed) != data.color_weight(kBlue)) {
    throw BalanceError("color weights differ: " + std::to_string(data.color_weight(kRed)) + " vs " +
                       std::to_string(data.color_weight(kBlue)));
  }
}

}  // namespace fairkm
