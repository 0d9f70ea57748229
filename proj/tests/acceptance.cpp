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


// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "fairkm/coreset.hpp"
#include "fairkm/experiment.hpp"
#include "fairkm/fairassign.hpp"
#include "fairkm/fairlets.hpp"
#include "fairkm/netflow.hpp"
#include "fairkm/sketch.hpp"
#include "fairkm/solvers.hpp"
#include "oracles.hpp"
#include "spectral.hpp"

using namespace fairkm;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

template <class... Args>
std::string format(const char* fmt, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

bool close(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

bool within(double value, double bound) { return value <= bound * (1 + 1e-9) + 1e-12; }

bool non_increasing(const std::vector<double>& costs) {
  for (std::size_t i = 1; i < costs.size(); ++i) {
    if (costs[i] > costs[i - 1] * (1 + 1e-12) + 1e-12) return false;
  }
  return true;
}

Dataset union_of(const Dataset& a, const Dataset& b) {
  Dataset out(a.dim(), a.num_colors());
  for (const Dataset* s : {&a, &b}) {
    for (std::size_t i = 0; i < s->size(); ++i) out.add(s->point(i), s->color(i), s->weight(i));
  }
  return out;
}

// 8 red and 8 blue points; half the instances are tight clumps so that the
// coreset actually moves points.
Dataset sandwich_instance(Rng& rng, bool clumped) {
  if (!clumped) return oracle::random_dataset(rng, 2, {8, 8});
  Dataset out(2, 2);
  const std::size_t sites = 2 + rng.below(3);
  std::vector<double> centers(2 * sites);
  for (auto& x : centers) x = 20.0 * rng.uniform();
  for (int i = 0; i < 16; ++i) {
    const std::size_t s = rng.below(sites);
    const double spread = 0.02 * rng.uniform();
    std::vector<double> p{centers[2 * s] + spread * rng.normal(), centers[2 * s + 1] + spread * rng.normal()};
    out.add(p, i < 8 ? kRed : kBlue);
  }
  return out;
}

Outcome transport_oracle() {
  Rng rng(101);
  const auto start = Clock::now();
  int mismatches = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const bool integer = trial % 2 == 0;
    const auto p = oracle::random_transport(rng, 6, 3, integer);
    const double got = solve_transport(p).total_cost;
    const double want = oracle::transport_min(p);
    const bool ok = integer ? got == want : close(got, want, 1e-12);
    mismatches += !ok;
  }
  const double elapsed = seconds_since(start);
  return {mismatches == 0 && elapsed < 10.0,
          format("500 instances, %d mismatches, %.2f s (limit 10 s)", mismatches, elapsed)};
}

Outcome costc_oracle() {
  Rng rng(102);
  int mismatches = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int reds = 1 + static_cast<int>(rng.below(6));
    const int blues = 1 + static_cast<int>(rng.below(6));
    const auto p = oracle::random_dataset(rng, 2, {reds, blues}, 10.0, 3);
    const std::size_t k = 1 + rng.below(3);
    const auto c = oracle::random_centers(rng, k, 2);
    std::vector<ColoringConstraint> all;
    for_each_coloring_constraint(p, k, [&](const ColoringConstraint& K) { all.push_back(K); });
    const auto& K = all[rng.below(all.size())];
    const auto got = color_constrained_cost(p, K, c);
    const double want = oracle::costc_brute(p, K, c);
    if (!got) {
      ++mismatches;
      continue;
    }
    worst = std::max(worst, std::abs(got->cost - want) / std::max(1.0, want));
    mismatches += !close(got->cost, want, 1e-9);
  }
  return {mismatches == 0, format("200 instances, %d mismatches, max rel error %.2e", mismatches, worst)};
}

Outcome fair_assignment_cover() {
  Rng rng(103);
  int mismatches = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(5));
    const auto p = oracle::random_dataset(rng, 2, {n, n}, 10.0, 2);
    const std::size_t k = 1 + rng.below(3);
    const auto c = oracle::random_centers(rng, k, 2);
    double best = oracle::kInf;
    for_each_fairness_constraint(
        p, k, Rational(1), Rational(1),
        [&](const ColoringConstraint& K) {
          if (auto r = color_constrained_cost(p, K, c)) best = std::min(best, r->cost);
        },
        true);
    mismatches += !close(fair_assignment(p, c).cost, best, 1e-9);
  }
  return {mismatches == 0, format("100 instances, %d mismatches", mismatches)};
}

Outcome coreset_sandwich() {
  Rng rng(104);
  std::size_t violations = 0, constraints = 0, compressed = 0, builds = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = sandwich_instance(rng, trial % 2 == 1);
    for (double eps : {0.1, 0.2}) {
      const std::size_t k = 1 + rng.below(3);
      CoresetOptions options;
      options.seed = static_cast<std::uint64_t>(trial);
      const auto s = build_fair_coreset(p, k, eps, options);
      VerifyOptions v;
      v.seed = static_cast<std::uint64_t>(trial);
      const auto report = verify_coreset(p, s, eps, v);
      violations += report.violations;
      constraints += report.constraints;
      worst = std::max(worst, report.max_deviation / eps);
      compressed += s.summary.size() < p.size();
      ++builds;
    }
  }
  return {violations == 0, format("%zu coresets (%zu compressed), %zu (K, C) checks, %zu violations, "
                                  "max deviation %.2f of eps",
                                  builds, compressed, constraints, violations, worst)};
}

Dataset gadget_points(bool swapped) {
  Dataset p(2, 2);
  for (double y : {0.0, 0.25, 4.0, 4.25}) {
    if (!swapped) {
      p.add(std::vector<double>{0.0, y}, kRed);
      p.add(std::vector<double>{16.0, y}, kBlue);
    } else {
      p.add(std::vector<double>{0.25, y}, kBlue);
      p.add(std::vector<double>{15.75, y}, kRed);
    }
  }
  return p;
}

Centers centers_of(std::initializer_list<std::pair<double, double>> cs) {
  Centers c(2);
  for (auto [x, y] : cs) c.add(std::vector<double>{x, y});
  return c;
}

double costc(const Dataset& p, const CountMatrix& K, const Centers& c) {
  const auto r = color_constrained_cost(p, K, c);
  return r ? r->cost : oracle::kInf;
}

Outcome composability() {
  Rng rng(105);
  std::size_t violations = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const auto p = sandwich_instance(rng, trial % 2 == 1);
    Dataset left(2, 2), right(2, 2);
    for (std::size_t i = 0; i < p.size(); ++i) (rng.below(2) == 0 ? left : right).add(p.point(i), p.color(i));
    const std::size_t k = 1 + rng.below(3);
    const double eps = trial % 3 == 0 ? 0.1 : 0.2;
    CoresetOptions options;
    options.seed = static_cast<std::uint64_t>(trial);
    const auto merged = merge(build_fair_coreset(left, k, eps, options), build_fair_coreset(right, k, eps, options));
    VerifyOptions v;
    v.seed = static_cast<std::uint64_t>(trial);
    violations += verify_coreset(union_of(left, right), merged, eps, v).violations;
  }

  // Two mirrored 8-point halves; each half's colorless summary puts its four
  // points of a column at the column middle.
  const Dataset p1 = gadget_points(false);
  const Dataset p2 = gadget_points(true);
  const Dataset p = union_of(p1, p2);
  const double eps = 0.25;
  Dataset s(2, 2);
  s.add(std::vector<double>{0.0, 2.125}, kRed, 4);
  s.add(std::vector<double>{16.0, 2.125}, kBlue, 4);
  s.add(std::vector<double>{0.25, 2.125}, kBlue, 4);
  s.add(std::vector<double>{15.75, 2.125}, kRed, 4);
  const auto sites = centers_of({{0.0, 2.125}, {16.0, 2.125}, {0.25, 2.125}, {15.75, 2.125}});
  const auto pairs = centers_of({{0.125, 0.125}, {0.125, 4.125}, {15.875, 0.125}, {15.875, 4.125}});
  const CountMatrix mono(4, 2, {4, 0, 0, 4, 0, 4, 4, 0});
  const CountMatrix fair(4, 2, {2, 2, 2, 2, 2, 2, 2, 2});
  const double mono_p = costc(p, mono, sites), mono_s = costc(s, mono, sites);
  const double fair_p = costc(p, fair, pairs), fair_s = costc(s, fair, pairs);
  // Factor by which the colorless summary misjudges, on either side.
  const double factor = std::max(mono_s > 0 ? mono_p / mono_s : oracle::kInf, fair_s / fair_p);

  VerifyOptions v;
  v.guard = {20, 4};
  v.random_trials = 3;
  v.near_trials = 3;
  v.extra_centers = {sites, pairs};
  FairCoreset colorless;
  colorless.k = 4;
  colorless.epsilon = eps;
  colorless.summary = s;
  const bool colorless_fails = !verify_coreset(p, colorless, eps, v).passed;
  const auto merged = merge(build_fair_coreset(p1, 4, eps), build_fair_coreset(p2, 4, eps));
  const auto fair_report = verify_coreset(p, merged, eps, v);

  const bool pass = violations == 0 && colorless_fails && fair_report.passed && factor >= 2.0;
  return {pass, format("30 merged splits, %zu violations; gadget: fair merge %s, colorless %s, "
                       "monochromatic cost %.4g vs summary %.4g, fair cost %.4g vs summary %.4g (factor %s)",
                       violations, fair_report.passed ? "passes" : "fails", colorless_fails ? "fails" : "passes",
                       mono_p, mono_s, fair_p, fair_s, std::isinf(factor) ? "inf" : format("%.2f", factor).c_str())};
}

Outcome fairlet_bound() {
  Rng rng(106);
  int violations = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(5));
    const auto p = oracle::random_dataset(rng, 2, {n, n});
    const std::size_t k = 1 + rng.below(std::min(n, 3));
    const auto f = compute_fairlets(p);
    std::vector<std::size_t> labels;
    const Centers c = oracle::exact_centers(f.representatives, static_cast<int>(k), labels);
    const double cost = assign_fairlets(p, f, c, labels).cost;
    const double opt = brute_force_opt(p, k).cost;
    if (opt > 0) worst = std::max(worst, cost / opt);
    violations += !within(cost, 6.5 * opt);
  }
  return {violations == 0, format("100 instances, %d violations, worst ratio %.3f (limit 6.5)", violations, worst)};
}

// True when every center is the mean of some two (possibly equal) points.
bool two_point_centroids(const Dataset& p, const Centers& c) {
  for (std::size_t i = 0; i < c.size(); ++i) {
    bool found = false;
    for (std::size_t a = 0; a < p.size() && !found; ++a) {
      for (std::size_t b = a; b < p.size() && !found; ++b) {
        bool same = true;
        for (std::size_t j = 0; j < p.dim(); ++j) {
          same = same && close(0.5 * (p.point(a)[j] + p.point(b)[j]), c[i][j], 1e-12);
        }
        found = same;
      }
    }
    if (!found) return false;
  }
  return true;
}

Outcome ptas_gate() {
  Rng rng(107);
  int violations = 0, realizable = 0, misses = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(7));
    const auto p = oracle::random_dataset(rng, 2, {n, n});
    const std::size_t k = 1 + rng.below(2);
    const auto opt = brute_force_opt(p, k);
    PtasOptions raw;
    raw.mode = PtasMode::kExhaustive;
    raw.polish = false;
    const double cost = ptas(p, k, 1.0, raw).clustering.cost;
    if (opt.cost > 0) worst = std::max(worst, cost / opt.cost);
    violations += !within(cost, 2.0 * opt.cost);
    if (two_point_centroids(p, opt.centers)) {
      ++realizable;
      misses += !close(cost, opt.cost, 1e-9);
    }
  }
  return {violations == 0 && misses == 0,
          format("100 instances, %d violations of 2x OPT (worst %.3f); OPT realizable by pair centroids on %d, "
                 "missed on %d",
                 violations, worst, realizable, misses)};
}

Outcome solver_orderings() {
  Rng rng(108);
  int failures = 0, runs = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(30));
    const auto p = oracle::random_dataset(rng, 2, {n, n}, 10.0, 3);
    const std::size_t k = 1 + rng.below(4);
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      SolverConfig config;
      config.k = k;
      config.seed = seed;
      const auto cklv = cklv_kmeanspp(p, config);
      const auto re = reassigned_cklv(p, config);
      const auto fair = fair_kmeanspp(p, config);
      const auto from_re = fair_kmeanspp(p, config, nullptr, &re.clustering.centers);
      const auto plain = kmeanspp(p, config);
      bool ok = within(re.clustering.cost, cklv.clustering.cost) &&
                within(from_re.clustering.cost, re.clustering.cost) && non_increasing(cklv.cost_history) &&
                non_increasing(fair.cost_history) && non_increasing(from_re.cost_history) &&
                non_increasing(plain.cost_history);
      for (const auto* r : {&cklv, &re, &fair, &from_re}) {
        ok = ok && check_fair(r->clustering, p, Rational(1), Rational(1)).fair;
      }
      failures += !ok;
      ++runs;
    }
  }
  return {failures == 0, format("%d (instance, seed) runs, %d failures", runs, failures)};
}

// Least-squares slope and intercept of log(time) against log(n).
std::pair<double, double> power_fit(const std::vector<double>& n, const std::vector<double>& t) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double x = std::log(n[i]), y = std::log(t[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return {slope, (sy - slope * sx) / m};
}

Outcome scalability() {
  const std::size_t n = 100000;
  const Dataset data = synthetic_mixture(n, 10, 5, 109);
  auto start = Clock::now();
  StreamingCoresetBuilder::Options options;
  options.coreset.size_target = 1000;
  options.coreset.seed = 1;
  StreamingCoresetBuilder builder(10, 2, 5, 0.2, options);
  builder.insert_all(data);
  const FairCoreset s = builder.finish();
  const double build = seconds_since(start);
  start = Clock::now();
  SolverConfig config;
  config.k = 5;
  config.seed = 1;
  const auto solved = fair_kmeanspp(s.summary, config);
  const double solve = seconds_since(start);
  const double pipeline = build + solve;
  const Centers& centers = solved.clustering.centers;

  std::vector<double> sizes, times;
  for (std::size_t m : {500, 1000, 2000, 4000}) {
    const Dataset sub = balanced_subsample(data, m, 7);
    start = Clock::now();
    fair_assignment_by_matching(sub, centers);
    sizes.push_back(static_cast<double>(m));
    times.push_back(std::max(seconds_since(start), 1e-6));
  }
  const auto [slope, intercept] = power_fit(sizes, times);
  const double projected = std::exp(intercept + slope * std::log(static_cast<double>(n)));

  start = Clock::now();
  fair_assignment(data, centers);
  const double hub = seconds_since(start);

  const bool pass = pipeline < 60.0 && projected > 10.0 * pipeline;
  return {pass, format("coreset %.2f s (%zu points, contract %s) + solve %.2f s = %.2f s (limit 60); direct pair "
                       "matching on %zu points projected %.3g s (t ~ n^%.2f, %.0fx the pipeline, need > 10x); "
                       "hub-flow fair_assignment on the full input measured %.2f s",
                       build, s.summary.size(), s.within_contract ? "kept" : "relaxed", solve, pipeline, n,
                       projected, slope, projected / pipeline, hub)};
}

Outcome coreset_quality() {
  double worst = 0.0;
  std::size_t runs = 0, failures = 0;
  std::string means;
  for (int ds = 0; ds < 5; ++ds) {
    const Dataset data = synthetic_mixture(5000, 5, 2, 110 + static_cast<std::uint64_t>(ds));
    ExperimentConfig config;
    config.ks = {2};
    config.algorithms = {Algorithm::kFair};
    config.repetitions = 5;
    config.seed = static_cast<std::uint64_t>(ds);
    const auto report = run_experiment(data, config);
    for (const auto& run : report.runs) {
      if (run.status != "ok") ++failures;
      if (run.pipeline != "coreset") continue;
      for (const auto& base : report.runs) {
        if (base.pipeline == "input" && base.repetition == run.repetition) {
          const double dev = std::abs(run.cost / base.cost - 1.0);
          worst = std::max(worst, dev);
          failures += dev > 0.10;
          ++runs;
        }
      }
    }
    for (const auto& row : report.aggregates) {
      if (row.pipeline == "coreset") means += format("%s%.4f", means.empty() ? "" : " ", row.ratio_to_input);
    }
  }
  return {failures == 0 && runs == 25,
          format("5 datasets x 5 seeds, %zu runs outside 10%%, worst |ratio - 1| = %.4f; mean ratios %s", failures,
                 worst, means.c_str())};
}

Outcome sketch_recovery() {
  Rng rng(111);
  int exact_failures = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t groups = 2 + rng.below(3);
    const std::size_t d = 4;
    Dataset a(d, 2);
    std::vector<std::vector<double>> means(groups, std::vector<double>(d, 0.0));
    std::vector<std::vector<double>> sites(groups, std::vector<double>(d));
    for (auto& s : sites) {
      for (auto& v : s) v = 1000.0 * rng.uniform() * static_cast<double>(groups);
    }
    const int per_group = 2 * (5 + static_cast<int>(rng.below(10)));
    for (std::size_t g = 0; g < groups; ++g) {
      for (int i = 0; i < per_group; ++i) {
        std::vector<double> row(d);
        for (std::size_t j = 0; j < d; ++j) row[j] = sites[g][j] + rng.normal();
        a.add(row, i % 2);
        for (std::size_t j = 0; j < d; ++j) means[g][j] += row[j] / per_group;
      }
    }
    SketchState state(d, 2, groups, 0.5, 8, static_cast<std::uint64_t>(trial));
    state.insert_all(a);
    const auto s = state.summary();
    SolverConfig config;
    config.k = groups;
    config.seed = static_cast<std::uint64_t>(trial);
    const auto fit = kmeanspp(s.summary, config);
    const auto clustering = nearest_assignment(s.summary, fit.centers);
    const auto centers = recover_centers(s, clustering);
    bool ok = centers.size() == groups;
    for (std::size_t c = 0; ok && c < centers.size(); ++c) {
      double best = oracle::kInf;
      std::size_t g_best = 0;
      for (std::size_t g = 0; g < groups; ++g) {
        const double dist = oracle::sqdist(centers[c], means[g]);
        if (dist < best) best = dist, g_best = g;
      }
      for (std::size_t j = 0; j < d; ++j) ok = ok && close(centers[c][j], means[g_best][j], 1e-9);
    }
    exact_failures += !ok;
  }

  int bound_failures = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = oracle::random_dataset(rng, 6, {20, 20});
    SketchState state(6, 2, 2, 0.5, 16, static_cast<std::uint64_t>(trial));
    state.insert_all(a);
    const auto t = state.summary();
    SolverConfig config;
    config.k = 2;
    config.seed = static_cast<std::uint64_t>(trial);
    const auto solved = fair_kmeanspp(t.summary, config);
    const double cost = fair_assignment(a, recover_centers(t, solved.clustering)).cost;
    const double bound = std::max(compute_fairlets(a).matching_cost, oracle::pca_lower_bound(a, 2));
    worst = std::max(worst, cost / bound);
    bound_failures += !(cost <= 3.0 * bound);
  }
  return {exact_failures == 0 && bound_failures == 0,
          format("exact recovery failed on %d of 20 grouped inputs; end-to-end cost over a certified lower bound "
                 "on OPT: worst %.3f on 20 inputs of 40 x 6, m = 16 (limit 3), %d failures",
                 exact_failures, worst, bound_failures)};
}

Outcome centroid_identity() {
  Rng rng(112);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t d = 1 + rng.below(6);
    const std::size_t n = 1 + rng.below(40);
    Dataset p(d, 1);
    std::vector<double> x(d);
    for (std::size_t i = 0; i < n; ++i) {
      for (auto& v : x) v = 200.0 * rng.uniform() - 100.0;
      p.add(x, 0, 1 + static_cast<Weight>(rng.below(5)));
    }
    Centers c(d);
    for (auto& v : x) v = 200.0 * rng.uniform() - 100.0;
    c.add(x);
    const auto mu = centroid(p);
    Centers m(d);
    m.add(mu);
    const double lhs = kmeans_cost(p, c);
    const double rhs = kmeans_cost(p, m) + static_cast<double>(p.total_weight()) * squared_distance(mu, c[0]);
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, lhs));
  }
  return {worst <= 1e-9, format("1000 pairs, max rel error %.2e (limit 1e-9)", worst)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"transport equals exhaustive enumeration", transport_oracle},
      {"constrained cost equals brute force", costc_oracle},
      {"fair assignment equals the constraint minimum", fair_assignment_cover},
      {"coreset sandwich", coreset_sandwich},
      {"composability and the colorless counterexample", composability},
      {"fairlet approximation bound", fairlet_bound},
      {"exhaustive ptas within twice the optimum", ptas_gate},
      {"solver orderings and fairness", solver_orderings},
      {"scalability on a 100k stream", scalability},
      {"coreset pipeline quality", coreset_quality},
      {"sketch recovery", sketch_recovery},
      {"centroid cost identity", centroid_identity},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = Clock::now();
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    failed += !out.pass;
    std::printf("%s %2zu %s: %s [%.1f s]\n", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                out.detail.c_str(), seconds_since(start));
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
