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


#include <algorithm>
#include <cmath>
#include <limits>

#include "fairkm/errors.hpp"
#include "fairkm/solvers.hpp"

namespace fairkm {
namespace {

// Index drawn with probability proportional to mass; mass must have a
// positive sum.
std::size_t draw(std::span<const double> mass, double total, Rng& rng) {
  const double target = rng.uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    if (mass[i] <= 0.0) continue;
    acc += mass[i];
    last_positive = i;
    if (target < acc) return i;
  }
  return last_positive;
}

void check_config(const SolverConfig& config) {
  if (config.k == 0) throw DomainError("k must be positive");
  if (config.max_iterations == 0) throw DomainError("max_iterations must be at least 1");
  if (!(config.tolerance >= 0.0)) throw DomainError("tolerance must be nonnegative");
}

}  // namespace

SeedResult kmeanspp_seed(const Dataset& points, std::size_t k, Rng& rng, const Centers* initial) {
  if (points.empty()) throw DomainError("k-means++ needs at least one point");
  if (k == 0) throw DomainError("k must be positive");
  const std::size_t n = points.size();
  SeedResult out;
  out.centers = initial != nullptr ? *initial : Centers(points.dim());
  if (out.centers.dim() != points.dim()) throw DomainError("initial centers have the wrong dimension");

  std::vector<double> mass(n);
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  auto absorb = [&](std::span<const double> c) {
    for (std::size_t i = 0; i < n; ++i) best[i] = std::min(best[i], squared_distance(points.point(i), c));
  };
  for (std::size_t c = 0; c < out.centers.size(); ++c) absorb(out.centers[c]);

  if (out.centers.size() == 0 && k > 0) {
    for (std::size_t i = 0; i < n; ++i) mass[i] = static_cast<double>(points.weight(i));
    const std::size_t first = draw(mass, static_cast<double>(points.total_weight()), rng);
    out.centers.add(points.point(first));
    absorb(points.point(first));
  }
  while (out.centers.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mass[i] = static_cast<double>(points.weight(i)) * best[i];
      total += mass[i];
    }
    std::size_t pick;
    if (total > 0.0) {
      pick = draw(mass, total, rng);
    } else {
      out.duplicates = true;
      for (std::size_t i = 0; i < n; ++i) mass[i] = static_cast<double>(points.weight(i));
      pick = draw(mass, static_cast<double>(points.total_weight()), rng);
    }
    out.centers.add(points.point(pick));
    absorb(points.point(pick));
  }
  return out;
}

SeedResult kmeanspp_seed(const Dataset& points, std::size_t k, std::uint64_t seed) {
  Rng rng(seed);
  return kmeanspp_seed(points, k, rng);
}

LloydResult lloyd(const Dataset& points, const Centers& init, const SolverConfig& config) {
  check_config(config);
  if (points.empty()) throw DomainError("Lloyd needs at least one point");
  if (init.size() == 0 || init.dim() != points.dim()) throw DomainError("Lloyd needs centers of the data dimension");
  const std::size_t n = points.size();
  const std::size_t d = points.dim();
  const std::size_t k = init.size();
  Rng rng(splitmix64(config.seed ^ 0x6c6c6f7964ULL));

  LloydResult out;
  out.centers = init;
  std::vector<std::size_t> label(n);
  std::vector<double> terms(n);
  std::vector<double> sums(k * d);
  std::vector<double> mass(k);
  double previous = std::numeric_limits<double>::infinity();

  while (out.iterations < config.max_iterations) {
    ++out.iterations;
    for (std::size_t i = 0; i < n; ++i) {
      const auto nc = nearest_center(points.point(i), out.centers);
      label[i] = nc.index;
      terms[i] = static_cast<double>(points.weight(i)) * nc.distance;
    }
    const double cost = pairwise_sum(terms);
    out.cost_history.push_back(cost);

    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(mass.begin(), mass.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double w = static_cast<double>(points.weight(i));
      const auto p = points.point(i);
      mass[label[i]] += w;
      for (std::size_t j = 0; j < d; ++j) sums[label[i] * d + j] += w * p[j];
    }
    Centers next = out.centers;
    for (std::size_t c = 0; c < k; ++c) {
      if (mass[c] == 0.0) continue;
      auto dst = next.mutable_center(c);
      for (std::size_t j = 0; j < d; ++j) dst[j] = sums[c * d + j] / mass[c];
    }
    // Empty clusters take a D^2 draw against the occupied centers.
    for (std::size_t c = 0; c < k; ++c) {
      if (mass[c] != 0.0) continue;
      std::vector<double> draw_mass(n);
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t o = 0; o < k; ++o) {
          if (mass[o] != 0.0 || o < c) best = std::min(best, squared_distance(points.point(i), next[o]));
        }
        draw_mass[i] = static_cast<double>(points.weight(i)) * best;
        total += draw_mass[i];
      }
      if (total <= 0.0) continue;
      const auto p = points.point(draw(draw_mass, total, rng));
      std::copy(p.begin(), p.end(), next.mutable_center(c).begin());
    }

    const bool unchanged = next == out.centers;
    out.centers = std::move(next);
    if (unchanged) break;
    if (config.stopping == StoppingMode::kCapOrTolerance && std::isfinite(previous) &&
        previous - cost <= config.tolerance * previous) {
      break;
    }
    previous = cost;
  }
  out.cost = kmeans_cost(points, out.centers);
  out.cost_history.push_back(out.cost);
  return out;
}

LloydResult kmeanspp(const Dataset& points, const SolverConfig& config) {
  check_config(config);
  Rng rng(config.seed);
  const SeedResult seed = kmeanspp_seed(points, config.k, rng);
  return lloyd(points, seed.centers, config);
}

}  // namespace fairkm
