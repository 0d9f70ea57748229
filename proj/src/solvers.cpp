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


#include "fairkm/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "fairkm/errors.hpp"
#include "fairkm/fairassign.hpp"

namespace fairkm {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct CklvRun {
  FairSolveResult result;
  Centers all_centers;  // before empty clusters are dropped
};

CklvRun run_cklv(const Dataset& data, const SolverConfig& config, const FairletDecomposition* fairlets) {
  require_two_color_balanced(data);
  CklvRun run;
  auto start = Clock::now();
  FairletDecomposition own;
  if (fairlets == nullptr) {
    own = compute_fairlets(data);
    fairlets = &own;
  }
  run.result.timings.fairlets = seconds_since(start);

  start = Clock::now();
  const LloydResult fit = kmeanspp(fairlets->representatives, config);
  run.result.timings.solve = seconds_since(start);
  run.result.iterations = fit.iterations;
  run.result.cost_history = fit.cost_history;

  start = Clock::now();
  std::vector<std::size_t> labels(fairlets->representatives.size());
  for (std::size_t f = 0; f < labels.size(); ++f) {
    labels[f] = nearest_center(fairlets->representatives.point(f), fit.centers).index;
  }
  run.all_centers = fit.centers;
  run.result.clustering = drop_empty_clusters(data, assign_fairlets(data, *fairlets, fit.centers, labels));
  run.result.timings.assignment = seconds_since(start);
  return run;
}

// Per-cluster weighted centroids of a (split) assignment; empty clusters keep
// their center and are reported in `empty`.
Centers cluster_means(const Dataset& data, const FairClustering& clustering, std::vector<bool>& empty) {
  const std::size_t k = clustering.centers.size();
  const std::size_t d = data.dim();
  std::vector<double> sums(k * d, 0.0);
  std::vector<double> mass(k, 0.0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto p = data.point(i);
    for (const auto& part : clustering.assignment[i]) {
      const double w = static_cast<double>(part.weight);
      mass[part.center] += w;
      for (std::size_t j = 0; j < d; ++j) sums[part.center * d + j] += w * p[j];
    }
  }
  Centers next = clustering.centers;
  empty.assign(k, false);
  for (std::size_t c = 0; c < k; ++c) {
    if (mass[c] == 0.0) {
      empty[c] = true;
      continue;
    }
    auto dst = next.mutable_center(c);
    for (std::size_t j = 0; j < d; ++j) dst[j] = sums[c * d + j] / mass[c];
  }
  return next;
}

void reseed_empty(const Dataset& data, Centers& centers, const std::vector<bool>& empty, Rng& rng) {
  const std::size_t k = centers.size();
  std::vector<bool> occupied(k);
  for (std::size_t c = 0; c < k; ++c) occupied[c] = !empty[c];
  for (std::size_t c = 0; c < k; ++c) {
    if (!empty[c]) continue;
    std::vector<double> mass(data.size());
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t o = 0; o < k; ++o) {
        if (occupied[o]) best = std::min(best, squared_distance(data.point(i), centers[o]));
      }
      mass[i] = static_cast<double>(data.weight(i)) * best;
      total += mass[i];
    }
    occupied[c] = true;
    if (!(total > 0.0) || !std::isfinite(total)) continue;
    const double target = rng.uniform() * total;
    double acc = 0.0;
    std::size_t pick = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (mass[i] <= 0.0) continue;
      acc += mass[i];
      pick = i;
      if (target < acc) break;
    }
    const auto p = data.point(pick);
    std::copy(p.begin(), p.end(), centers.mutable_center(c).begin());
  }
}

}  // namespace

FairSolveResult cklv_kmeanspp(const Dataset& data, const SolverConfig& config, const FairletDecomposition* fairlets) {
  return run_cklv(data, config, fairlets).result;
}

FairSolveResult reassigned_cklv(const Dataset& data, const SolverConfig& config,
                                const FairletDecomposition* fairlets) {
  CklvRun run = run_cklv(data, config, fairlets);
  const auto start = Clock::now();
  FairClustering reassigned = fair_assignment(data, run.all_centers);
  run.result.clustering = drop_empty_clusters(data, reassigned);
  run.result.timings.assignment += seconds_since(start);
  run.result.cost_history.push_back(run.result.clustering.cost);
  return run.result;
}

FairSolveResult fair_kmeanspp(const Dataset& data, const SolverConfig& config, const FairletDecomposition* fairlets,
                              const Centers* init) {
  require_two_color_balanced(data);
  if (config.k == 0) throw DomainError("k must be positive");
  if (config.max_iterations == 0) throw DomainError("max_iterations must be at least 1");
  FairSolveResult out;
  Rng rng(config.seed);
  Centers centers;
  if (init != nullptr) {
    centers = *init;
  } else {
    auto start = Clock::now();
    FairletDecomposition own;
    if (fairlets == nullptr) {
      own = compute_fairlets(data);
      fairlets = &own;
    }
    out.timings.fairlets = seconds_since(start);
    start = Clock::now();
    centers = kmeanspp_seed(fairlets->representatives, config.k, rng).centers;
    out.timings.solve = seconds_since(start);
  }

  auto start = Clock::now();
  double previous = std::numeric_limits<double>::infinity();
  while (out.iterations < config.max_iterations) {
    ++out.iterations;
    const FairClustering step = fair_assignment(data, centers);
    out.cost_history.push_back(step.cost);
    std::vector<bool> empty;
    Centers next = cluster_means(data, step, empty);
    reseed_empty(data, next, empty, rng);
    const bool unchanged = next == centers;
    centers = std::move(next);
    if (unchanged) break;
    if (config.stopping == StoppingMode::kCapOrTolerance && std::isfinite(previous) &&
        previous - step.cost <= config.tolerance * previous) {
      break;
    }
    previous = step.cost;
  }
  out.timings.solve += seconds_since(start);

  start = Clock::now();
  out.clustering = drop_empty_clusters(data, fair_assignment(data, centers));
  out.cost_history.push_back(out.clustering.cost);
  out.timings.assignment = seconds_since(start);
  return out;
}

FairSolveResult ptas(const Dataset& data, std::size_t k, double epsilon, const PtasOptions& options) {
  require_two_color_balanced(data);
  if (k == 0) throw DomainError("k must be positive");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw DomainError("epsilon must be positive");
  const std::size_t m = static_cast<std::size_t>(std::ceil(2.0 / epsilon));
  const std::size_t n = data.size();
  const std::size_t d = data.dim();
  const bool guard_ok = n <= 14 && k <= 2 && epsilon >= 1.0;
  if (options.mode == PtasMode::kExhaustive && !guard_ok) {
    throw GuardError("exhaustive PTAS limited to 14 points, k <= 2, epsilon >= 1");
  }
  const bool exhaustive = options.mode == PtasMode::kExhaustive || (options.mode == PtasMode::kAuto && guard_ok);

  FairSolveResult out;
  const auto start = Clock::now();
  double best_cost = std::numeric_limits<double>::infinity();
  Centers best(d);
  auto consider = [&](const Centers& c) {
    const double cost = fair_assignment(data, c).cost;
    if (cost < best_cost) {
      best_cost = cost;
      best = c;
    }
  };

  if (exhaustive) {
    // Every multiset of m points gives one group centroid.
    std::vector<std::vector<double>> groups;
    std::vector<std::size_t> pick(m, 0);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t slot, std::size_t from) {
      if (slot == m) {
        std::vector<double> mean(d, 0.0);
        for (auto i : pick) {
          const auto p = data.point(i);
          for (std::size_t j = 0; j < d; ++j) mean[j] += p[j];
        }
        for (auto& x : mean) x /= static_cast<double>(m);
        groups.push_back(std::move(mean));
        return;
      }
      for (std::size_t i = from; i < n; ++i) {
        pick[slot] = i;
        rec(slot + 1, i);
      }
    };
    rec(0, 0);
    // Multisets of k groups, in canonical nondecreasing order.
    std::vector<std::size_t> choice(k, 0);
    std::function<void(std::size_t, std::size_t)> choose = [&](std::size_t slot, std::size_t from) {
      if (slot == k) {
        Centers c(d);
        for (auto g : choice) c.add(groups[g]);
        consider(c);
        return;
      }
      for (std::size_t g = from; g < groups.size(); ++g) {
        choice[slot] = g;
        choose(slot + 1, g);
      }
    };
    choose(0, 0);
  } else {
    Rng rng(options.seed);
    std::vector<double> cumulative(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += static_cast<double>(data.weight(i));
      cumulative[i] = acc;
    }
    for (std::size_t s = 0; s < std::max<std::size_t>(options.samples, 1); ++s) {
      Centers c(d);
      for (std::size_t g = 0; g < k; ++g) {
        std::vector<double> mean(d, 0.0);
        for (std::size_t t = 0; t < m; ++t) {
          const double u = rng.uniform() * acc;
          const auto i = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                                                  cumulative.begin());
          const auto p = data.point(std::min(i, n - 1));
          for (std::size_t j = 0; j < d; ++j) mean[j] += p[j];
        }
        for (auto& x : mean) x /= static_cast<double>(m);
        c.add(mean);
      }
      consider(c);
    }
  }
  out.timings.solve = seconds_since(start);
  out.cost_history.push_back(best_cost);

  if (options.polish) {
    SolverConfig config;
    config.k = k;
    config.seed = options.seed;
    FairSolveResult polished = fair_kmeanspp(data, config, nullptr, &best);
    out.iterations = polished.iterations;
    out.timings.solve += polished.timings.solve;
    out.timings.assignment = polished.timings.assignment;
    out.cost_history.insert(out.cost_history.end(), polished.cost_history.begin(), polished.cost_history.end());
    out.clustering = std::move(polished.clustering);
  } else {
    const auto t = Clock::now();
    out.clustering = drop_empty_clusters(data, fair_assignment(data, best));
    out.timings.assignment = seconds_since(t);
  }
  return out;
}

FairClustering brute_force_opt(const Dataset& data, std::size_t k, BruteForceGuard guard) {
  require_two_color_balanced(data);
  if (k == 0) throw DomainError("k must be positive");
  if (data.total_weight() > guard.max_total_weight || k > guard.max_k) {
    throw GuardError("brute force limited to total weight " + std::to_string(guard.max_total_weight) +
                     " and k <= " + std::to_string(guard.max_k));
  }
  const std::size_t d = data.dim();
  std::vector<std::size_t> units;
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (Weight w = 0; w < data.weight(i); ++w) units.push_back(i);
  }
  const std::size_t n = units.size();
  std::vector<std::size_t> label(n, 0);
  std::vector<std::size_t> best_label;
  std::vector<int> balance(k, 0);
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> sums(k * d);
  std::vector<double> counts(k);

  auto evaluate = [&]() {
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0.0);
    for (std::size_t u = 0; u < n; ++u) {
      const auto p = data.point(units[u]);
      counts[label[u]] += 1.0;
      for (std::size_t j = 0; j < d; ++j) sums[label[u] * d + j] += p[j];
    }
    double cost = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
      const auto p = data.point(units[u]);
      const std::size_t l = label[u];
      for (std::size_t j = 0; j < d; ++j) {
        const double diff = p[j] - sums[l * d + j] / counts[l];
        cost += diff * diff;
      }
    }
    if (cost < best) {
      best = cost;
      best_label = label;
    }
  };
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t u, std::size_t used) {
    if (u == n) {
      evaluate();
      return;
    }
    const int sign = data.color(units[u]) == kRed ? 1 : -1;
    const std::size_t limit = std::min(used + 1, k);
    for (std::size_t c = 0; c < limit; ++c) {
      label[u] = c;
      balance[c] += sign;
      std::size_t imbalance = 0;
      for (int b : balance) imbalance += static_cast<std::size_t>(std::abs(b));
      if (imbalance <= n - u - 1) rec(u + 1, std::max(used, c + 1));
      balance[c] -= sign;
    }
  };
  rec(0, 0);

  std::size_t used = 0;
  for (auto l : best_label) used = std::max(used, l + 1);
  std::vector<double> s(used * d, 0.0);
  std::vector<double> cnt(used, 0.0);
  Assignment assignment(data.size());
  for (std::size_t u = 0; u < n; ++u) {
    const auto p = data.point(units[u]);
    cnt[best_label[u]] += 1.0;
    for (std::size_t j = 0; j < d; ++j) s[best_label[u] * d + j] += p[j];
    auto& parts = assignment[units[u]];
    auto it = std::find_if(parts.begin(), parts.end(), [&](const AssignmentPart& a) { return a.center == best_label[u]; });
    if (it == parts.end()) {
      parts.push_back({best_label[u], 1});
    } else {
      ++it->weight;
    }
  }
  Centers centers(d);
  std::vector<double> mean(d);
  for (std::size_t c = 0; c < used; ++c) {
    for (std::size_t j = 0; j < d; ++j) mean[j] = s[c * d + j] / cnt[c];
    centers.add(mean);
  }
  return make_clustering(data, std::move(centers), std::move(assignment));
}

}  // namespace fairkm
