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


#include "fairkm/coreset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <unordered_map>

#include "fairkm/errors.hpp"
#include "fairkm/random.hpp"
#include "fairkm/solvers.hpp"

namespace fairkm {
namespace {

struct KeyHash {
  std::size_t operator()(const std::vector<std::int64_t>& key) const {
    std::uint64_t h = 0x243f6a8885a308d3ULL;
    for (auto v : key) h = splitmix64(h ^ static_cast<std::uint64_t>(v));
    return static_cast<std::size_t>(h);
  }
};

using CellMap = std::unordered_map<std::vector<std::int64_t>, std::size_t, KeyHash>;

// Exact-coordinate key; -0.0 and 0.0 collapse.
std::vector<std::int64_t> location_key(std::span<const double> p, std::int64_t tag = 0) {
  std::vector<std::int64_t> key;
  key.reserve(p.size() + 1);
  key.push_back(tag);
  for (double x : p) key.push_back(std::bit_cast<std::int64_t>(x + 0.0));
  return key;
}

// Distinct locations of a point set (colorless), with per-point location ids.
struct Locations {
  Dataset points;  // one color
  std::vector<std::size_t> of_point;
};

Locations locate(const Dataset& data) {
  Locations out;
  out.points = Dataset(data.dim(), 1);
  out.of_point.resize(data.size());
  CellMap index;
  std::vector<Weight> weights;
  std::vector<std::size_t> first;
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto [it, fresh] = index.emplace(location_key(data.point(i)), first.size());
    if (fresh) {
      first.push_back(i);
      weights.push_back(0);
    }
    weights[it->second] += data.weight(i);
    out.of_point[i] = it->second;
  }
  out.points.reserve(first.size());
  for (std::size_t l = 0; l < first.size(); ++l) out.points.add(data.point(first[l]), 0, weights[l]);
  return out;
}

double nn_bound(const Dataset& locations, std::size_t k) {
  const std::size_t n = locations.size();
  if (n <= k) return 0.0;
  std::vector<double> terms(n);
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) best = std::min(best, squared_distance(locations.point(i), locations.point(j)));
    }
    terms[i] = static_cast<double>(locations.weight(i)) * best;
  }
  std::sort(terms.begin(), terms.end(), std::greater<>());
  return 0.25 * pairwise_sum(std::span<const double>(terms).subspan(k));
}

// Farthest-first traversal picks k + 1 locations; two of them share a
// cluster in any k-clustering, and that pair alone costs at least
// w_i w_j / (w_i + w_j) |x_i - x_j|^2.
double separation_bound(const Dataset& locations, std::size_t k) {
  const std::size_t n = locations.size();
  if (n <= k) return 0.0;
  std::vector<std::size_t> chosen{0};
  std::vector<double> gap(n);
  for (std::size_t i = 0; i < n; ++i) gap[i] = squared_distance(locations.point(i), locations.point(0));
  while (chosen.size() < k + 1) {
    const auto next = static_cast<std::size_t>(std::max_element(gap.begin(), gap.end()) - gap.begin());
    chosen.push_back(next);
    for (std::size_t i = 0; i < n; ++i) {
      gap[i] = std::min(gap[i], squared_distance(locations.point(i), locations.point(next)));
    }
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < chosen.size(); ++a) {
    for (std::size_t b = a + 1; b < chosen.size(); ++b) {
      const double wa = static_cast<double>(locations.weight(chosen[a]));
      const double wb = static_cast<double>(locations.weight(chosen[b]));
      best = std::min(best, wa * wb / (wa + wb) *
                                squared_distance(locations.point(chosen[a]), locations.point(chosen[b])));
    }
  }
  return best;
}

// Weight-proportional sample with replacement, multiplicities as weights.
Dataset sample_locations(const Dataset& locations, std::size_t size, Rng& rng) {
  if (locations.size() <= size) return locations;
  std::vector<double> cumulative(locations.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < locations.size(); ++i) {
    acc += static_cast<double>(locations.weight(i));
    cumulative[i] = acc;
  }
  std::map<std::size_t, Weight> hits;
  for (std::size_t s = 0; s < size; ++s) {
    const double u = rng.uniform() * acc;
    auto i = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
    ++hits[std::min(i, locations.size() - 1)];
  }
  Dataset out(locations.dim(), 1);
  for (auto [i, w] : hits) out.add(locations.point(i), 0, w);
  return out;
}

double sampled_estimate(const Dataset& locations, const Dataset& sample, std::size_t k, std::uint64_t seed) {
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t run = 0; run < 3; ++run) {
    SolverConfig config;
    config.k = k;
    config.max_iterations = 20;
    config.seed = splitmix64(seed + run);
    best = std::min(best, kmeans_cost(locations, kmeanspp(sample, config).centers));
  }
  return best;
}

struct Snap {
  std::vector<std::size_t> cell_of_location;
  std::vector<std::vector<double>> cell_position;
  double movement = 0.0;
  std::size_t summary_size = 0;
};

class Grid {
 public:
  Grid(const Dataset& data, const Locations& locations, const Centers& anchors, double radius, bool single_ring)
      : data_(data), locations_(locations), anchors_(anchors), radius_(radius) {
    const std::size_t n = locations.points.size();
    anchor_.resize(n);
    ring_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto nc = nearest_center(locations.points.point(i), anchors);
      anchor_[i] = nc.index;
      const double dist = std::sqrt(nc.distance);
      max_distance_ = std::max(max_distance_, dist);
      ring_[i] = dist < radius || single_ring ? 0 : static_cast<int>(std::floor(std::log2(dist / radius))) + 1;
    }
    const auto colors = static_cast<std::size_t>(data.num_colors());
    colors_of_location_.assign(n * colors, false);
    for (std::size_t p = 0; p < data.size(); ++p) {
      colors_of_location_[locations.of_point[p] * colors + static_cast<std::size_t>(data.color(p))] = true;
    }
  }

  double max_distance() const { return max_distance_; }

  // Side 0 isolates every location.
  Snap snap(double side) const {
    const std::size_t n = locations_.points.size();
    const std::size_t d = data_.dim();
    const auto colors = static_cast<std::size_t>(data_.num_colors());
    Snap out;
    out.cell_of_location.resize(n);
    if (side <= 0.0) {
      for (std::size_t i = 0; i < n; ++i) {
        out.cell_of_location[i] = i;
        const auto p = locations_.points.point(i);
        out.cell_position.emplace_back(p.begin(), p.end());
      }
      out.summary_size = count_summary(out, n, colors);
      return out;
    }
    CellMap cells;
    std::vector<double> sums;
    std::vector<double> mass;
    std::vector<std::size_t> members;
    std::vector<std::size_t> first;
    std::vector<std::int64_t> key(d + 2);
    for (std::size_t i = 0; i < n; ++i) {
      const auto p = locations_.points.point(i);
      const auto a = anchors_[anchor_[i]];
      const double s = std::ldexp(side, ring_[i]);
      key[0] = static_cast<std::int64_t>(anchor_[i]);
      key[1] = ring_[i];
      for (std::size_t j = 0; j < d; ++j) {
        const double q = std::round((p[j] - a[j]) / s);
        key[j + 2] = std::abs(q) < 4e18 ? static_cast<std::int64_t>(q) : std::bit_cast<std::int64_t>(p[j]);
      }
      auto [it, fresh] = cells.emplace(key, first.size());
      if (fresh) {
        first.push_back(i);
        members.push_back(0);
        mass.push_back(0.0);
        sums.resize(sums.size() + d, 0.0);
      }
      const std::size_t c = it->second;
      const double w = static_cast<double>(locations_.points.weight(i));
      ++members[c];
      mass[c] += w;
      for (std::size_t j = 0; j < d; ++j) sums[c * d + j] += w * p[j];
      out.cell_of_location[i] = c;
    }
    out.cell_position.resize(first.size());
    for (std::size_t c = 0; c < first.size(); ++c) {
      if (members[c] == 1) {
        const auto p = locations_.points.point(first[c]);
        out.cell_position[c].assign(p.begin(), p.end());
      } else {
        out.cell_position[c].resize(d);
        for (std::size_t j = 0; j < d; ++j) out.cell_position[c][j] = sums[c * d + j] / mass[c];
      }
    }
    std::vector<double> terms(n);
    for (std::size_t i = 0; i < n; ++i) {
      terms[i] = static_cast<double>(locations_.points.weight(i)) *
                 squared_distance(locations_.points.point(i), out.cell_position[out.cell_of_location[i]]);
    }
    out.movement = pairwise_sum(terms);
    out.summary_size = count_summary(out, first.size(), colors);
    return out;
  }

 private:
  std::size_t count_summary(const Snap& snap, std::size_t cells, std::size_t colors) const {
    std::vector<bool> seen(cells * colors, false);
    std::size_t count = 0;
    for (std::size_t i = 0; i < snap.cell_of_location.size(); ++i) {
      for (std::size_t c = 0; c < colors; ++c) {
        if (!colors_of_location_[i * colors + c]) continue;
        const std::size_t slot = snap.cell_of_location[i] * colors + c;
        if (!seen[slot]) {
          seen[slot] = true;
          ++count;
        }
      }
    }
    return count;
  }

  const Dataset& data_;
  const Locations& locations_;
  const Centers& anchors_;
  double radius_;
  std::vector<std::size_t> anchor_;
  std::vector<int> ring_;
  std::vector<bool> colors_of_location_;
  double max_distance_ = 0.0;
};

// Summary points keyed by (position, color), in first-seen order.
struct SummaryBuilder {
  SummaryBuilder(std::size_t dim, int colors, std::size_t provenance_dim, bool provenance)
      : summary(dim, colors), provenance_dim(provenance_dim), with_provenance(provenance) {}

  void add(std::span<const double> position, Color color, Weight weight, const Provenance* prov) {
    auto [it, fresh] = index.emplace(location_key(position, color), weights.size());
    if (fresh) {
      positions.emplace_back(position.begin(), position.end());
      colors.push_back(color);
      weights.push_back(0);
      if (with_provenance) provenance.push_back({0, std::vector<double>(provenance_dim, 0.0)});
    }
    const std::size_t s = it->second;
    weights[s] += weight;
    if (with_provenance && prov != nullptr) {
      provenance[s].count += prov->count;
      for (std::size_t j = 0; j < provenance_dim; ++j) provenance[s].linear_sum[j] += prov->linear_sum[j];
    }
  }

  Dataset finish() {
    summary.reserve(weights.size());
    for (std::size_t s = 0; s < weights.size(); ++s) summary.add(positions[s], colors[s], weights[s]);
    return std::move(summary);
  }

  Dataset summary;
  std::size_t provenance_dim;
  bool with_provenance;
  CellMap index;
  std::vector<std::vector<double>> positions;
  std::vector<Color> colors;
  std::vector<Weight> weights;
  std::vector<Provenance> provenance;
};

void check_parameters(std::size_t k, double epsilon) {
  if (k == 0) throw DomainError("k must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
}

}  // namespace

double nearest_neighbor_lower_bound(const Dataset& points, std::size_t k) {
  if (k == 0) throw DomainError("k must be positive");
  return nn_bound(locate(points).points, k);
}

double separation_lower_bound(const Dataset& points, std::size_t k) {
  if (k == 0) throw DomainError("k must be positive");
  return separation_bound(locate(points).points, k);
}

Dataset colorless_projection(const Dataset& points) { return locate(points).points; }

FairCoreset build_fair_coreset(const Dataset& points, std::size_t k, double epsilon, const CoresetOptions& options,
                               const std::vector<Provenance>* provenance) {
  check_parameters(k, epsilon);
  if (provenance != nullptr && provenance->size() != points.size()) {
    throw DomainError("provenance must have one entry per point");
  }
  FairCoreset out;
  out.k = k;
  out.epsilon = epsilon;
  out.epsilon_accumulated = epsilon;
  const bool with_provenance = provenance != nullptr || options.track_provenance;
  if (provenance != nullptr) {
    out.provenance_dim = provenance->empty() ? points.dim() : provenance->front().linear_sum.size();
  } else if (with_provenance) {
    out.provenance_dim = points.dim();
  }

  const Locations locations = locate(points);
  const std::size_t n = locations.points.size();
  const double total = static_cast<double>(points.total_weight());

  double bound = 0.0;
  Rng rng(splitmix64(options.seed ^ 0x636f72657365ULL));
  Dataset sample;
  if (n > k) {
    sample = sample_locations(locations.points, std::max<std::size_t>(options.sample_size, k), rng);
    if (options.opt_lower_bound) {
      bound = *options.opt_lower_bound;
    } else if (n <= options.certified_limit) {
      bound = std::max(nn_bound(locations.points, k), separation_bound(locations.points, k));
    } else {
      const double estimate = sampled_estimate(locations.points, sample, k, options.seed);
      bound = estimate / (8.0 * (std::log(static_cast<double>(k)) + 2.0));
    }
  }
  out.opt_lower_bound = bound;

  Snap snap;
  if (bound > 0.0) {
    const auto full_count = std::min<std::size_t>(
        sample.size(), k * static_cast<std::size_t>(std::ceil(std::log2(std::max(total, 1.0)) + 1.0)));
    const double radius = std::sqrt(bound / total);
    const double grid_budget = 0.25 * epsilon * epsilon / 16.0 * bound;
    // Fewer anchors, then a single ring per anchor, are tried only when the
    // size target cannot be met otherwise.
    std::size_t anchor_count = full_count;
    bool single_ring = false;
    while (true) {
      Rng anchor_rng(splitmix64(options.seed ^ 0x616e63686f72ULL));
      const Centers anchors = kmeanspp_seed(sample, anchor_count, anchor_rng).centers;
      const Grid grid(points, locations, anchors, radius, single_ring);
      double side = 0.5 * epsilon * radius;
      snap = grid.snap(side);
      for (int halvings = 0; snap.movement > grid_budget; ++halvings) {
        if (halvings == 60) {
          side = 0.0;
          snap = grid.snap(side);
          break;
        }
        side *= 0.5;
        snap = grid.snap(side);
      }
      if (options.size_target == 0 || snap.summary_size <= options.size_target) break;
      if (side == 0.0) side = 0.5 * epsilon * radius;
      // Doubling stops once every ring of every anchor is a single cell.
      while (snap.summary_size > options.size_target && side <= 4.0 * grid.max_distance() + radius) {
        side *= 2.0;
        snap = grid.snap(side);
      }
      if (snap.summary_size <= options.size_target) break;
      if (anchor_count > std::min(k, sample.size())) {
        anchor_count = std::max(std::min(k, sample.size()), anchor_count / 2);
      } else if (!single_ring) {
        single_ring = true;
      } else {
        break;
      }
    }
  } else {
    snap.cell_of_location.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      snap.cell_of_location[i] = i;
      const auto p = locations.points.point(i);
      snap.cell_position.emplace_back(p.begin(), p.end());
    }
  }
  out.movement_budget_used = snap.movement;
  out.within_contract = snap.movement <= epsilon * epsilon / 16.0 * bound * (1.0 + 1e-12);

  SummaryBuilder summary(points.dim(), points.num_colors(), out.provenance_dim, with_provenance);
  Provenance own;
  for (std::size_t p = 0; p < points.size(); ++p) {
    const Provenance* prov = nullptr;
    if (provenance != nullptr) {
      prov = &(*provenance)[p];
    } else if (with_provenance) {
      const auto x = points.point(p);
      own.count = points.weight(p);
      own.linear_sum.resize(x.size());
      for (std::size_t j = 0; j < x.size(); ++j) own.linear_sum[j] = static_cast<double>(own.count) * x[j];
      prov = &own;
    }
    summary.add(snap.cell_position[snap.cell_of_location[locations.of_point[p]]], points.color(p), points.weight(p),
                prov);
  }
  out.summary = summary.finish();
  out.provenance = std::move(summary.provenance);
  return out;
}

FairCoreset merge(const FairCoreset& a, const FairCoreset& b) {
  if (a.k != b.k || a.epsilon != b.epsilon) throw DomainError("merge needs coresets built with the same k and epsilon");
  if (a.summary.dim() != b.summary.dim() || a.summary.num_colors() != b.summary.num_colors()) {
    throw DomainError("merge needs coresets of the same dimension and color count");
  }
  if (a.has_provenance() != b.has_provenance() || a.provenance_dim != b.provenance_dim) {
    throw DomainError("merge needs matching provenance");
  }
  FairCoreset out;
  out.k = a.k;
  out.epsilon = a.epsilon;
  out.epsilon_accumulated = std::max(a.epsilon_accumulated, b.epsilon_accumulated);
  out.movement_budget_used = a.movement_budget_used + b.movement_budget_used;
  out.opt_lower_bound = a.opt_lower_bound + b.opt_lower_bound;
  out.within_contract = a.within_contract && b.within_contract;
  out.provenance_dim = a.provenance_dim;
  const bool with_provenance = a.has_provenance();
  SummaryBuilder summary(a.summary.dim(), a.summary.num_colors(), a.provenance_dim, with_provenance);
  for (const FairCoreset* s : {&a, &b}) {
    for (std::size_t i = 0; i < s->summary.size(); ++i) {
      summary.add(s->summary.point(i), s->summary.color(i), s->summary.weight(i),
                  with_provenance ? &s->provenance[i] : nullptr);
    }
  }
  out.summary = summary.finish();
  out.provenance = std::move(summary.provenance);
  return out;
}

FairCoreset recompress(const FairCoreset& s, std::size_t k, double epsilon, const CoresetOptions& options) {
  check_parameters(k, epsilon);
  CoresetOptions inner = options;
  if (s.opt_lower_bound > 0.0) inner.opt_lower_bound = s.opt_lower_bound;
  FairCoreset out = build_fair_coreset(s.summary, k, epsilon, inner, s.has_provenance() ? &s.provenance : nullptr);
  if (s.has_provenance()) out.provenance_dim = s.provenance_dim;
  // Displacements add along the chain x -> pi1(x) -> pi2(pi1(x)); by
  // Minkowski the squared totals compose as (sqrt(a) + sqrt(b))^2.
  const double chained = std::sqrt(s.movement_budget_used) + std::sqrt(out.movement_budget_used);
  out.movement_budget_used = chained * chained;
  out.opt_lower_bound = s.opt_lower_bound > 0.0 ? s.opt_lower_bound : out.opt_lower_bound;
  out.epsilon_accumulated = (1.0 + s.epsilon_accumulated) * (1.0 + epsilon) - 1.0;
  out.within_contract = s.within_contract && out.movement_budget_used <= out.epsilon_accumulated *
                                                                             out.epsilon_accumulated / 16.0 *
                                                                             out.opt_lower_bound * (1.0 + 1e-12);
  return out;
}

StreamingCoresetBuilder::StreamingCoresetBuilder(std::size_t dim, int num_colors, std::size_t k, double epsilon,
                                                 Options options)
    : dim_(dim), num_colors_(num_colors), k_(k), epsilon_(epsilon), options_(options), buffer_(dim, num_colors) {
  check_parameters(k, epsilon);
  if (options_.block_size == 0) throw DomainError("block size must be positive");
}

void StreamingCoresetBuilder::insert(std::span<const double> coords, Color color, Weight weight,
                                     const Provenance* provenance) {
  if (coords.size() != dim_) throw DomainError("point dimension differs from the stream dimension");
  const bool tracking = options_.coreset.track_provenance;
  if (provenance != nullptr && !tracking) throw DomainError("provenance given to a builder that does not track it");
  buffer_.add(coords, color, weight);
  if (tracking) {
    if (provenance != nullptr) {
      buffer_provenance_.push_back(*provenance);
    } else {
      Provenance own{weight, std::vector<double>(coords.size())};
      for (std::size_t j = 0; j < coords.size(); ++j) own.linear_sum[j] = static_cast<double>(weight) * coords[j];
      buffer_provenance_.push_back(std::move(own));
    }
  }
  ++seen_;
  if (buffer_.size() >= options_.block_size) flush();
}

void StreamingCoresetBuilder::insert_all(const Dataset& points) {
  for (std::size_t i = 0; i < points.size(); ++i) insert(points.point(i), points.color(i), points.weight(i));
}

void StreamingCoresetBuilder::absorb(const FairCoreset& coreset) {
  if (coreset.k != k_ || coreset.epsilon != epsilon_) throw DomainError("absorbed coreset has other parameters");
  push(coreset, 0);
}

void StreamingCoresetBuilder::flush() {
  if (buffer_.empty()) return;
  CoresetOptions options = options_.coreset;
  options.seed = splitmix64(options_.coreset.seed + blocks_);
  ++blocks_;
  FairCoreset block = build_fair_coreset(buffer_, k_, epsilon_, options,
                                         options_.coreset.track_provenance ? &buffer_provenance_ : nullptr);
  buffer_ = Dataset(dim_, num_colors_);
  buffer_provenance_.clear();
  push(std::move(block), 0);
}

FairCoreset StreamingCoresetBuilder::reduce(const FairCoreset& merged) {
  const std::size_t limit = options_.coreset.size_target > 0 ? options_.coreset.size_target : options_.block_size;
  if (merged.summary.size() <= limit) return merged;
  CoresetOptions options = options_.coreset;
  options.seed = splitmix64(options_.coreset.seed ^ (0x7265647563650000ULL + blocks_));
  return recompress(merged, k_, epsilon_, options);
}

void StreamingCoresetBuilder::push(FairCoreset coreset, std::size_t level) {
  while (true) {
    if (levels_.size() <= level) levels_.resize(level + 1);
    if (!levels_[level]) {
      levels_[level] = std::move(coreset);
      return;
    }
    coreset = reduce(merge(*levels_[level], coreset));
    levels_[level].reset();
    ++level;
  }
}

FairCoreset StreamingCoresetBuilder::finish() {
  flush();
  std::optional<FairCoreset> acc;
  for (auto& level : levels_) {
    if (!level) continue;
    acc = acc ? merge(*acc, *level) : *level;
    level.reset();
  }
  levels_.clear();
  if (!acc) {
    FairCoreset empty;
    empty.k = k_;
    empty.epsilon = epsilon_;
    empty.epsilon_accumulated = epsilon_;
    empty.summary = Dataset(dim_, num_colors_);
    if (options_.coreset.track_provenance) empty.provenance_dim = dim_;
    return empty;
  }
  FairCoreset out = reduce(*acc);
  push(out, 0);
  return out;
}

VerifyReport verify_coreset(const Dataset& points, const FairCoreset& coreset, double epsilon,
                            const VerifyOptions& options) {
  const std::size_t k = coreset.k;
  if (points.total_weight() > options.guard.max_total_weight || k > options.guard.max_k) {
    throw GuardError("coreset verification limited to total weight " + std::to_string(options.guard.max_total_weight) +
                     " and k <= " + std::to_string(options.guard.max_k));
  }
  if (points.empty()) throw DomainError("verification needs a nonempty input");
  if (coreset.summary.dim() != points.dim() || coreset.summary.num_colors() != points.num_colors()) {
    throw DomainError("coreset and input differ in dimension or color count");
  }
  const std::size_t d = points.dim();
  std::vector<double> lo(d, std::numeric_limits<double>::infinity());
  std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      lo[j] = std::min(lo[j], points.point(i)[j]);
      hi[j] = std::max(hi[j], points.point(i)[j]);
    }
  }
  double diagonal = 0.0;
  for (std::size_t j = 0; j < d; ++j) diagonal += (hi[j] - lo[j]) * (hi[j] - lo[j]);
  diagonal = diagonal > 0.0 ? std::sqrt(diagonal) : 1.0;

  Rng rng(options.seed);
  std::vector<Centers> trials = options.extra_centers;
  for (std::size_t t = 0; t < options.random_trials; ++t) {
    Centers c(d);
    std::vector<double> x(d);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        const double pad = 0.1 * std::max(hi[j] - lo[j], diagonal * 0.1);
        x[j] = lo[j] - pad + (hi[j] - lo[j] + 2 * pad) * rng.uniform();
      }
      c.add(x);
    }
    trials.push_back(std::move(c));
  }
  for (std::size_t t = 0; t < options.near_trials; ++t) {
    Centers c(d);
    std::vector<double> x(d);
    for (std::size_t i = 0; i < k; ++i) {
      const auto p = points.point(rng.below(points.size()));
      for (std::size_t j = 0; j < d; ++j) x[j] = p[j] + 0.02 * diagonal * rng.normal();
      c.add(x);
    }
    trials.push_back(std::move(c));
  }

  VerifyReport report;
  const auto colors = static_cast<std::size_t>(points.num_colors());
  for (const Centers& centers : trials) {
    if (centers.size() != k || centers.dim() != d) throw DomainError("center set must have k centers of dimension d");
    ++report.center_sets;
    std::vector<std::map<std::vector<Weight>, std::optional<double>>> cache_p(colors);
    std::vector<std::map<std::vector<Weight>, std::optional<double>>> cache_s(colors);
    auto lookup = [&](auto& cache, const Dataset& data, std::size_t color, const std::vector<Weight>& column) {
      auto it = cache[color].find(column);
      if (it == cache[color].end()) {
        it = cache[color].emplace(column, color_transport_cost(data, static_cast<Color>(color), column, centers)).first;
      }
      return it->second;
    };
    std::vector<Weight> column(k);
    for_each_coloring_constraint(
        points, k,
        [&](const ColoringConstraint& K) {
          ++report.constraints;
          double cost_p = 0.0;
          double cost_s = 0.0;
          bool feasible_s = true;
          for (std::size_t j = 0; j < colors; ++j) {
            for (std::size_t i = 0; i < k; ++i) column[i] = K.at(i, j);
            cost_p += *lookup(cache_p, points, j, column);
            const auto s = lookup(cache_s, coreset.summary, j, column);
            if (!s) {
              feasible_s = false;
              break;
            }
            cost_s += *s;
          }
          double deviation;
          if (!feasible_s) {
            deviation = std::numeric_limits<double>::infinity();
          } else if (cost_p == 0.0) {
            deviation = cost_s <= 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
          } else {
            deviation = std::abs(cost_s - cost_p) / cost_p;
          }
          report.max_deviation = std::max(report.max_deviation, deviation);
          if (deviation > epsilon + 1e-12) ++report.violations;
        },
        options.guard);
  }
  report.passed = report.violations == 0;
  return report;
}

namespace {

constexpr char kMagic[4] = {'F', 'K', 'M', 'C'};
constexpr std::uint32_t kVersion = 1;

void put_u64(std::ostream& out, std::uint64_t v) {
  char bytes[8];
  for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((v >> (8 * b)) & 0xff);
  out.write(bytes, 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  if (!in) throw DomainError("truncated coreset record");
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
  return v;
}

void put_f64(std::ostream& out, double x) { put_u64(out, std::bit_cast<std::uint64_t>(x)); }
double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }
void put_i64(std::ostream& out, std::int64_t x) { put_u64(out, static_cast<std::uint64_t>(x)); }
std::int64_t get_i64(std::istream& in) { return static_cast<std::int64_t>(get_u64(in)); }

}  // namespace

void write_coreset(std::ostream& out, const FairCoreset& c) {
  out.write(kMagic, 4);
  put_u64(out, kVersion);
  put_u64(out, c.summary.dim());
  put_u64(out, static_cast<std::uint64_t>(c.summary.num_colors()));
  put_u64(out, c.k);
  put_f64(out, c.epsilon);
  put_f64(out, c.movement_budget_used);
  put_f64(out, c.opt_lower_bound);
  put_f64(out, c.epsilon_accumulated);
  put_u64(out, c.within_contract ? 1 : 0);
  put_u64(out, c.has_provenance() ? 1 : 0);
  put_u64(out, c.provenance_dim);
  put_u64(out, c.summary.size());
  for (std::size_t i = 0; i < c.summary.size(); ++i) {
    for (double x : c.summary.point(i)) put_f64(out, x);
    put_i64(out, c.summary.color(i));
    put_i64(out, c.summary.weight(i));
    if (c.has_provenance()) {
      put_i64(out, c.provenance[i].count);
      for (double x : c.provenance[i].linear_sum) put_f64(out, x);
    }
  }
  if (!out) throw DomainError("failed to write coreset record");
}

FairCoreset read_coreset(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw DomainError("not a coreset record");
  if (get_u64(in) != kVersion) throw DomainError("unsupported coreset record version");
  FairCoreset c;
  const auto d = static_cast<std::size_t>(get_u64(in));
  const auto colors = static_cast<int>(get_u64(in));
  c.k = static_cast<std::size_t>(get_u64(in));
  c.epsilon = get_f64(in);
  c.movement_budget_used = get_f64(in);
  c.opt_lower_bound = get_f64(in);
  c.epsilon_accumulated = get_f64(in);
  c.within_contract = get_u64(in) != 0;
  const bool with_provenance = get_u64(in) != 0;
  c.provenance_dim = static_cast<std::size_t>(get_u64(in));
  const auto n = static_cast<std::size_t>(get_u64(in));
  c.summary = Dataset(d, colors);
  std::vector<double> x(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : x) v = get_f64(in);
    const auto color = static_cast<Color>(get_i64(in));
    const Weight w = get_i64(in);
    c.summary.add(x, color, w);
    if (with_provenance) {
      Provenance p;
      p.count = get_i64(in);
      p.linear_sum.resize(c.provenance_dim);
      for (auto& v : p.linear_sum) v = get_f64(in);
      c.provenance.push_back(std::move(p));
    }
  }
  return c;
}

}  // namespace fairkm
