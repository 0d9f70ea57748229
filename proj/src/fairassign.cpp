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

#include "fairkm/fairassign.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include "fairkm/errors.hpp"
#include "fairkm/netflow.hpp"

namespace fairkm {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_centers(const Dataset& data, const Centers& centers) {
  if (centers.size() == 0) throw DomainError("empty center set");
  if (centers.dim() != data.dim()) throw DomainError("center dimension differs from data dimension");
}

void add_part(std::vector<AssignmentPart>& parts, std::size_t center, Weight w) {
  for (auto& p : parts) {
    if (p.center == center) {
      p.weight += w;
      return;
    }
  }
  parts.push_back({center, w});
}

// Transport of one color's points into centers with the given demands.
// Fills `assignment` for those points when non-null.
std::optional<double> solve_color(const Dataset& data, Color color, std::span<const Weight> demands,
                                  const Centers& centers, Assignment* assignment) {
  if (demands.size() != centers.size()) throw DomainError("constraint rows must match the number of centers");
  Weight total = 0;
  for (Weight d : demands) {
    if (d < 0) throw DomainError("coloring constraint entries must be nonnegative");
    total += d;
  }
  if (total != data.color_weight(color)) return std::nullopt;
  if (total == 0) return 0.0;

  const auto points = data.indices_of_color(color);
  std::vector<std::size_t> open;
  for (std::size_t i = 0; i < demands.size(); ++i) {
    if (demands[i] > 0) open.push_back(i);
  }
  TransportProblem problem;
  for (auto p : points) problem.supplies.push_back(data.weight(p));
  for (auto i : open) problem.demands.push_back(demands[i]);
  problem.costs.resize(points.size() * open.size());
  for (std::size_t a = 0; a < points.size(); ++a) {
    for (std::size_t b = 0; b < open.size(); ++b) {
      problem.costs[a * open.size() + b] = squared_distance(data.point(points[a]), centers[open[b]]);
    }
  }
  const FlowResult flow = solve_transport(problem);
  if (assignment != nullptr) {
    for (const auto& f : flow.flows) add_part((*assignment)[points[f.source]], open[f.sink], f.amount);
  }
  return flow.total_cost;
}

// Min-cost flow source -> red -> center -> blue -> sink. Each augmenting path
// is found by Bellman-Ford over the k center nodes; the cheapest way to enter
// a center, leave it, or shift weight between two centers is read off lazy
// min-heaps over the points.
class HubFlow {
 public:
  HubFlow(const Dataset& data, const Centers& centers)
      : data_(data), k_(centers.size()), reds_(data.indices_of_color(kRed)), blues_(data.indices_of_color(kBlue)) {
    red_dist_.resize(reds_.size() * k_);
    blue_dist_.resize(blues_.size() * k_);
    for (std::size_t r = 0; r < reds_.size(); ++r) {
      for (std::size_t i = 0; i < k_; ++i) red_dist_[r * k_ + i] = squared_distance(data.point(reds_[r]), centers[i]);
    }
    for (std::size_t b = 0; b < blues_.size(); ++b) {
      for (std::size_t i = 0; i < k_; ++i) {
        blue_dist_[b * k_ + i] = squared_distance(data.point(blues_[b]), centers[i]);
      }
    }
    red_left_.resize(reds_.size());
    blue_left_.resize(blues_.size());
    for (std::size_t r = 0; r < reds_.size(); ++r) red_left_[r] = data.weight(reds_[r]);
    for (std::size_t b = 0; b < blues_.size(); ++b) blue_left_[b] = data.weight(blues_[b]);
    red_at_.resize(reds_.size());
    blue_at_.resize(blues_.size());

    enter_.resize(k_);
    leave_.resize(k_);
    red_shift_.resize(k_ * k_);
    blue_shift_.resize(k_ * k_);
    for (std::size_t i = 0; i < k_; ++i) {
      std::vector<Entry> e;
      e.reserve(reds_.size());
      for (std::size_t r = 0; r < reds_.size(); ++r) e.emplace_back(rd(r, i), r);
      enter_[i] = Heap(std::greater<>{}, std::move(e));
      std::vector<Entry> l;
      l.reserve(blues_.size());
      for (std::size_t b = 0; b < blues_.size(); ++b) l.emplace_back(bd(b, i), b);
      leave_[i] = Heap(std::greater<>{}, std::move(l));
    }
  }

  Assignment solve() {
    Weight remaining = 0;
    for (Weight w : red_left_) remaining += w;
    while (remaining > 0) remaining -= augment();
    Assignment out(data_.size());
    for (std::size_t r = 0; r < reds_.size(); ++r) {
      for (auto [c, w] : red_at_[r]) out[reds_[r]].push_back({c, w});
    }
    for (std::size_t b = 0; b < blues_.size(); ++b) {
      for (auto [c, w] : blue_at_[b]) out[blues_[b]].push_back({c, w});
    }
    for (auto& parts : out) {
      std::sort(parts.begin(), parts.end(), [](const auto& a, const auto& b) { return a.center < b.center; });
    }
    return out;
  }

 private:
  using Entry = std::pair<double, std::size_t>;
  using Heap = std::priority_queue<Entry, std::vector<Entry>, std::greater<>>;
  using Holding = std::vector<std::pair<std::size_t, Weight>>;

  enum class Step { kEnter, kRedShift, kBlueShift };

  double rd(std::size_t r, std::size_t i) const { return red_dist_[r * k_ + i]; }
  double bd(std::size_t b, std::size_t i) const { return blue_dist_[b * k_ + i]; }

  static Weight held(const Holding& h, std::size_t c) {
    for (auto [center, w] : h) {
      if (center == c) return w;
    }
    return 0;
  }

  // Adds delta (possibly negative) to a holding; returns true when the entry
  // went from zero to positive.
  static bool change(Holding& h, std::size_t c, Weight delta) {
    for (auto it = h.begin(); it != h.end(); ++it) {
      if (it->first == c) {
        it->second += delta;
        if (it->second == 0) h.erase(it);
        return false;
      }
    }
    h.emplace_back(c, delta);
    return true;
  }

  template <typename Valid>
  static const Entry* top(Heap& heap, Valid valid) {
    while (!heap.empty() && !valid(heap.top().second)) heap.pop();
    return heap.empty() ? nullptr : &heap.top();
  }

  void red_arrived(std::size_t r, std::size_t c) {
    for (std::size_t j = 0; j < k_; ++j) {
      if (j != c) red_shift_[c * k_ + j].emplace(rd(r, j) - rd(r, c), r);
    }
  }

  void blue_arrived(std::size_t b, std::size_t c) {
    // Transition i -> c reroutes blue b from c to i.
    for (std::size_t i = 0; i < k_; ++i) {
      if (i != c) blue_shift_[i * k_ + c].emplace(bd(b, i) - bd(b, c), b);
    }
  }

  Weight augment() {
    std::vector<double> dist(k_, kInf);
    std::vector<std::size_t> pred(k_, k_);
    std::vector<Step> how(k_, Step::kEnter);
    std::vector<std::size_t> via(k_, 0);

    for (std::size_t i = 0; i < k_; ++i) {
      const Entry* e = top(enter_[i], [&](std::size_t r) { return red_left_[r] > 0; });
      if (e != nullptr) {
        dist[i] = e->first;
        via[i] = e->second;
      }
    }
    // Cheapest transition per ordered center pair.
    std::vector<double> shift(k_ * k_, kInf);
    std::vector<Step> shift_how(k_ * k_, Step::kRedShift);
    std::vector<std::size_t> shift_via(k_ * k_, 0);
    for (std::size_t i = 0; i < k_; ++i) {
      for (std::size_t j = 0; j < k_; ++j) {
        if (i == j) continue;
        const std::size_t ij = i * k_ + j;
        const Entry* red = top(red_shift_[ij], [&](std::size_t r) { return held(red_at_[r], i) > 0; });
        const Entry* blue = top(blue_shift_[ij], [&](std::size_t b) { return held(blue_at_[b], j) > 0; });
        if (red != nullptr) {
          shift[ij] = red->first;
          shift_via[ij] = red->second;
        }
        if (blue != nullptr && blue->first < shift[ij]) {
          shift[ij] = blue->first;
          shift_how[ij] = Step::kBlueShift;
          shift_via[ij] = blue->second;
        }
      }
    }
    for (std::size_t round = 0; round < k_; ++round) {
      bool changed = false;
      for (std::size_t i = 0; i < k_; ++i) {
        if (!std::isfinite(dist[i])) continue;
        for (std::size_t j = 0; j < k_; ++j) {
          const std::size_t ij = i * k_ + j;
          if (i == j || !std::isfinite(shift[ij])) continue;
          const double nd = dist[i] + shift[ij];
          if (nd < dist[j] - 1e-12 * (1.0 + std::abs(dist[j]))) {
            dist[j] = nd;
            pred[j] = i;
            how[j] = shift_how[ij];
            via[j] = shift_via[ij];
            changed = true;
          }
        }
      }
      if (!changed) break;
    }

    std::size_t last = k_;
    double best = kInf;
    std::size_t exit_blue = 0;
    for (std::size_t i = 0; i < k_; ++i) {
      if (!std::isfinite(dist[i])) continue;
      const Entry* e = top(leave_[i], [&](std::size_t b) { return blue_left_[b] > 0; });
      if (e == nullptr) continue;
      if (dist[i] + e->first < best) {
        best = dist[i] + e->first;
        last = i;
        exit_blue = e->second;
      }
    }
    if (last == k_) throw InfeasibleError("fair assignment: no augmenting path");

    // Collect the path as center sequence from entry to exit.
    std::vector<std::size_t> path;
    for (std::size_t c = last;; c = pred[c]) {
      path.push_back(c);
      if (how[c] == Step::kEnter) break;
      if (path.size() > k_) throw InfeasibleError("fair assignment: cyclic augmenting path");
    }
    std::reverse(path.begin(), path.end());

    Weight delta = std::min(red_left_[via[path.front()]], blue_left_[exit_blue]);
    for (std::size_t a = 1; a < path.size(); ++a) {
      const std::size_t from = path[a - 1];
      const std::size_t to = path[a];
      const std::size_t p = via[to];
      delta = std::min(delta, how[to] == Step::kRedShift ? held(red_at_[p], from) : held(blue_at_[p], to));
    }
    if (delta <= 0) throw InfeasibleError("fair assignment: zero-capacity augmenting path");

    const std::size_t first_red = via[path.front()];
    red_left_[first_red] -= delta;
    if (change(red_at_[first_red], path.front(), delta)) red_arrived(first_red, path.front());
    for (std::size_t a = 1; a < path.size(); ++a) {
      const std::size_t from = path[a - 1];
      const std::size_t to = path[a];
      const std::size_t p = via[to];
      if (how[to] == Step::kRedShift) {
        change(red_at_[p], from, -delta);
        if (change(red_at_[p], to, delta)) red_arrived(p, to);
      } else {
        change(blue_at_[p], to, -delta);
        if (change(blue_at_[p], from, delta)) blue_arrived(p, from);
      }
    }
    blue_left_[exit_blue] -= delta;
    if (change(blue_at_[exit_blue], last, delta)) blue_arrived(exit_blue, last);
    return delta;
  }

  const Dataset& data_;
  std::size_t k_;
  std::vector<std::size_t> reds_;
  std::vector<std::size_t> blues_;
  std::vector<double> red_dist_;
  std::vector<double> blue_dist_;
  std::vector<Weight> red_left_;
  std::vector<Weight> blue_left_;
  std::vector<Holding> red_at_;
  std::vector<Holding> blue_at_;
  std::vector<Heap> enter_;
  std::vector<Heap> leave_;
  std::vector<Heap> red_shift_;
  std::vector<Heap> blue_shift_;
};

void check_guard(const Dataset& data, std::size_t k, const EnumerationGuard& guard) {
  if (data.total_weight() > guard.max_total_weight || k > guard.max_k) {
    throw GuardError("constraint enumeration limited to total weight " + std::to_string(guard.max_total_weight) +
                     " and k <= " + std::to_string(guard.max_k));
  }
  if (k == 0) throw DomainError("k must be positive");
}

void enumerate_columns(const Dataset& data, std::size_t k,
                       const std::function<void(const ColoringConstraint&)>& visit) {
  const std::size_t colors = static_cast<std::size_t>(data.num_colors());
  std::vector<std::vector<std::vector<Weight>>> options(colors);
  for (std::size_t j = 0; j < colors; ++j) options[j] = compositions(data.color_weight(static_cast<Color>(j)), k);
  ColoringConstraint K(k, colors);
  std::function<void(std::size_t)> rec = [&](std::size_t j) {
    if (j == colors) {
      visit(K);
      return;
    }
    for (const auto& column : options[j]) {
      for (std::size_t i = 0; i < k; ++i) K.at(i, j) = column[i];
      rec(j + 1);
    }
  };
  rec(0);
}

}  // namespace

std::optional<double> color_transport_cost(const Dataset& data, Color color, std::span<const Weight> demands,
                                           const Centers& centers) {
  require_centers(data, centers);
  return solve_color(data, color, demands, centers, nullptr);
}

std::optional<ConstrainedAssignment> color_constrained_cost(const Dataset& data, const ColoringConstraint& K,
                                                            const Centers& centers) {
  require_centers(data, centers);
  if (K.rows() != centers.size() || K.cols() != static_cast<std::size_t>(data.num_colors())) {
    throw DomainError("coloring constraint must be k x l");
  }
  ConstrainedAssignment out;
  out.assignment.resize(data.size());
  std::vector<double> per_color;
  for (std::size_t j = 0; j < K.cols(); ++j) {
    std::vector<Weight> demands(K.rows());
    for (std::size_t i = 0; i < K.rows(); ++i) demands[i] = K.at(i, j);
    const auto cost = solve_color(data, static_cast<Color>(j), demands, centers, &out.assignment);
    if (!cost) return std::nullopt;
    per_color.push_back(*cost);
  }
  out.cost = pairwise_sum(per_color);
  return out;
}

FairClustering fair_assignment(const Dataset& data, const Centers& centers) {
  require_two_color_balanced(data);
  require_centers(data, centers);
  HubFlow flow(data, centers);
  return make_clustering(data, centers, flow.solve());
}

FairClustering fair_assignment_by_matching(const Dataset& data, const Centers& centers) {
  require_two_color_balanced(data);
  require_centers(data, centers);
  const std::size_t k = centers.size();
  const auto reds = data.indices_of_color(kRed);
  const auto blues = data.indices_of_color(kBlue);
  std::vector<double> rdist(reds.size() * k);
  std::vector<double> bdist(blues.size() * k);
  for (std::size_t r = 0; r < reds.size(); ++r) {
    for (std::size_t i = 0; i < k; ++i) rdist[r * k + i] = squared_distance(data.point(reds[r]), centers[i]);
  }
  for (std::size_t b = 0; b < blues.size(); ++b) {
    for (std::size_t i = 0; i < k; ++i) bdist[b * k + i] = squared_distance(data.point(blues[b]), centers[i]);
  }
  TransportProblem problem;
  for (auto r : reds) problem.supplies.push_back(data.weight(r));
  for (auto b : blues) problem.demands.push_back(data.weight(b));
  problem.costs.resize(reds.size() * blues.size());
  std::vector<std::size_t> pair_center(reds.size() * blues.size());
  for (std::size_t r = 0; r < reds.size(); ++r) {
    for (std::size_t b = 0; b < blues.size(); ++b) {
      double best = kInf;
      std::size_t arg = 0;
      for (std::size_t i = 0; i < k; ++i) {
        const double c = rdist[r * k + i] + bdist[b * k + i];
        if (c < best) {
          best = c;
          arg = i;
        }
      }
      problem.costs[r * blues.size() + b] = best;
      pair_center[r * blues.size() + b] = arg;
    }
  }
  const FlowResult flow = solve_transport(problem);
  Assignment assignment(data.size());
  for (const auto& f : flow.flows) {
    const std::size_t c = pair_center[f.source * blues.size() + f.sink];
    add_part(assignment[reds[f.source]], c, f.amount);
    add_part(assignment[blues[f.sink]], c, f.amount);
  }
  for (auto& parts : assignment) {
    std::sort(parts.begin(), parts.end(), [](const auto& a, const auto& b) { return a.center < b.center; });
  }
  return make_clustering(data, centers, std::move(assignment));
}

std::vector<std::vector<Weight>> compositions(Weight total, std::size_t parts) {
  std::vector<std::vector<Weight>> out;
  if (parts == 0) {
    if (total == 0) out.emplace_back();
    return out;
  }
  std::vector<Weight> current(parts, 0);
  std::function<void(std::size_t, Weight)> rec = [&](std::size_t i, Weight left) {
    if (i + 1 == parts) {
      current[i] = left;
      out.push_back(current);
      return;
    }
    for (Weight a = 0; a <= left; ++a) {
      current[i] = a;
      rec(i + 1, left - a);
    }
  };
  rec(0, total);
  return out;
}

void for_each_coloring_constraint(const Dataset& data, std::size_t k,
                                  const std::function<void(const ColoringConstraint&)>& visit,
                                  EnumerationGuard guard) {
  check_guard(data, k, guard);
  enumerate_columns(data, k, visit);
}

void for_each_fairness_constraint(const Dataset& data, std::size_t k, Rational alpha, Rational beta,
                                  const std::function<void(const ColoringConstraint&)>& visit,
                                  bool allow_empty_clusters, EnumerationGuard guard) {
  check_guard(data, k, guard);
  enumerate_columns(data, k, [&](const ColoringConstraint& K) {
    // Drop empty rows (when allowed) and test the remaining ones.
    std::vector<Weight> kept;
    std::size_t rows = 0;
    for (std::size_t i = 0; i < K.rows(); ++i) {
      if (K.row_sum(i) == 0) {
        if (!allow_empty_clusters) return;
        continue;
      }
      for (std::size_t j = 0; j < K.cols(); ++j) kept.push_back(K.at(i, j));
      ++rows;
    }
    if (rows == 0) return;
    if (check_fair(CountMatrix(rows, K.cols(), std::move(kept)), data, alpha, beta).fair) visit(K);
  });
}

std::vector<ColoringConstraint> fairness_constraints_cover(const Dataset& data, std::size_t k, Rational alpha,
                                                           Rational beta, bool allow_empty_clusters,
                                                           EnumerationGuard guard) {
  std::vector<ColoringConstraint> out;
  for_each_fairness_constraint(
      data, k, alpha, beta, [&](const ColoringConstraint& K) { out.push_back(K); }, allow_empty_clusters, guard);
  return out;
}

}  // namespace fairkm
