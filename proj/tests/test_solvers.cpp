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

#include "doctest.h"
#include "fairkm/errors.hpp"
#include "fairkm/fairassign.hpp"
#include "fairkm/solvers.hpp"
#include "oracles.hpp"

using namespace fairkm;

namespace {

Dataset two_color(std::initializer_list<std::tuple<double, double, Color, Weight>> pts) {
  Dataset d(2, 2);
  for (auto [x, y, c, w] : pts) d.add(std::vector<double>{x, y}, c, w);
  return d;
}

Dataset canonical() {
  return two_color({{1, 0, kRed, 1}, {11, 0, kRed, 1}, {0, 0, kBlue, 1}, {10, 0, kBlue, 1}});
}

Dataset line1(std::initializer_list<double> xs) {
  Dataset d(1, 1);
  for (double x : xs) d.add(std::vector<double>{x}, 0);
  return d;
}

SolverConfig cfg(std::size_t k, std::uint64_t seed = 1) {
  SolverConfig c;
  c.k = k;
  c.seed = seed;
  return c;
}

bool non_increasing(const std::vector<double>& xs) {
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (xs[i] > xs[i - 1] * (1 + 1e-12) + 1e-12) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("kmeanspp_seed examples") {
  Dataset two(2, 1);
  two.add(std::vector<double>{0, 0}, 0);
  two.add(std::vector<double>{3, 0}, 0);
  Centers first(2);
  first.add(std::vector<double>{0, 0});
  for (std::uint64_t s = 0; s < 20; ++s) {
    Rng rng(s);
    const auto r = kmeanspp_seed(two, 2, rng, &first);
    CHECK(r.centers[1][0] == 3.0);
    CHECK_FALSE(r.duplicates);
  }

  Dataset same(2, 1);
  for (int i = 0; i < 4; ++i) same.add(std::vector<double>{2, 2}, 0);
  const auto r = kmeanspp_seed(same, 3, 5);
  CHECK(r.duplicates);
  for (std::size_t i = 0; i < 3; ++i) CHECK(r.centers[i][0] == 2.0);
  CHECK_THROWS_AS(kmeanspp_seed(Dataset(2, 1), 1, 0), DomainError);
}

TEST_CASE("kmeanspp_seed follows the D^2 law") {
  const auto p = line1({0, 1, 10});
  Centers first(1);
  first.add(std::vector<double>{0});
  const int runs = 10000;
  int hits = 0;
  Rng rng(77);
  for (int t = 0; t < runs; ++t) {
    if (kmeanspp_seed(p, 2, rng, &first).centers[1][0] == 10.0) ++hits;
  }
  const double q = 100.0 / 101.0;
  const double sigma = std::sqrt(runs * q * (1 - q));
  CHECK(std::abs(hits - runs * q) <= 3 * sigma);
}

TEST_CASE("lloyd examples") {
  const auto p = line1({0, 2, 10, 12});
  Centers init(1);
  init.add(std::vector<double>{0});
  init.add(std::vector<double>{10});
  const auto r = lloyd(p, init, cfg(2));
  CHECK(r.centers[0][0] == 1.0);
  CHECK(r.centers[1][0] == 11.0);
  CHECK(r.cost == 4.0);
  CHECK(r.cost == oracle::kmeans_opt(p, 2));

  const auto again = lloyd(p, r.centers, cfg(2));
  CHECK(again.iterations == 1);
  CHECK(again.centers == r.centers);

  Centers one(1);
  one.add(std::vector<double>{100});
  const auto single = lloyd(p, one, cfg(1));
  CHECK(single.centers[0][0] == 6.0);
  CHECK(single.cost == kmeans_cost(p, single.centers));

  SolverConfig bad = cfg(2);
  bad.max_iterations = 0;
  CHECK_THROWS_AS(lloyd(p, init, bad), DomainError);
}

TEST_CASE("lloyd re-seeds an empty cluster") {
  const auto p = line1({0, 1, 10, 11});
  Centers init(1);
  init.add(std::vector<double>{0.5});
  init.add(std::vector<double>{100});
  const auto r = lloyd(p, init, cfg(2, 3));
  CHECK(r.cost == doctest::Approx(1.0));
  CHECK(non_increasing(r.cost_history));
}

TEST_CASE("fair solvers on the canonical instance") {
  const auto p = canonical();
  for (std::uint64_t s = 0; s < 10; ++s) {
    CHECK(cklv_kmeanspp(p, cfg(2, s)).clustering.cost == doctest::Approx(1.0));
    CHECK(reassigned_cklv(p, cfg(2, s)).clustering.cost == doctest::Approx(1.0));
    CHECK(fair_kmeanspp(p, cfg(2, s)).clustering.cost == doctest::Approx(1.0));
  }
  const auto one = cklv_kmeanspp(p, cfg(1));
  Centers mu(2);
  mu.add(centroid(p));
  CHECK(one.clustering.cost == doctest::Approx(kmeans_cost(p, mu)));
  CHECK(one.clustering.centers.size() == 1);

  const auto sites = two_color({{0, 0, kRed, 1}, {0, 0, kBlue, 1}, {5, 5, kRed, 2}, {5, 5, kBlue, 2},
                                {-3, 7, kRed, 1}, {-3, 7, kBlue, 1}});
  CHECK(cklv_kmeanspp(sites, cfg(3)).clustering.cost == 0.0);

  CHECK_THROWS_AS(cklv_kmeanspp(two_color({{0, 0, kRed, 2}, {0, 0, kBlue, 1}}), cfg(1)), BalanceError);
}

TEST_CASE("fair Lloyd stops at once from a fixed point") {
  const auto p = canonical();
  const auto opt = brute_force_opt(p, 2);
  const auto r = fair_kmeanspp(p, cfg(2), nullptr, &opt.centers);
  CHECK(r.iterations == 1);
  CHECK(r.clustering.cost == doctest::Approx(1.0));
}

TEST_CASE("ptas examples") {
  const auto p = canonical();
  CHECK(ptas(p, 2, 1.0).clustering.cost == doctest::Approx(1.0));
  PtasOptions raw;
  raw.polish = false;
  CHECK(ptas(p, 2, 1.0, raw).clustering.cost == doctest::Approx(1.0));
  Centers mu(2);
  mu.add(centroid(p));
  CHECK(ptas(p, 1, 1.0).clustering.cost == doctest::Approx(kmeans_cost(p, mu)));

  PtasOptions exhaustive;
  exhaustive.mode = PtasMode::kExhaustive;
  CHECK_THROWS_AS(ptas(p, 3, 1.0, exhaustive), GuardError);
  CHECK_THROWS_AS(ptas(p, 2, 0.5, exhaustive), GuardError);
  PtasOptions sampling;
  sampling.mode = PtasMode::kSampling;
  sampling.samples = 300;
  CHECK(ptas(p, 2, 0.5, sampling).clustering.cost == doctest::Approx(1.0));
}

TEST_CASE("brute_force_opt examples") {
  const auto p = canonical();
  const auto opt = brute_force_opt(p, 2);
  CHECK(opt.cost == doctest::Approx(1.0));
  CHECK(check_fair(opt, p, Rational(1), Rational(1)).fair);

  const auto pairs = two_color({{0, 0, kRed, 1}, {0, 0, kBlue, 1}, {4, 1, kRed, 1}, {4, 1, kBlue, 1}});
  CHECK(brute_force_opt(pairs, 2).cost == 0.0);

  Centers mu(2);
  mu.add(centroid(p));
  CHECK(brute_force_opt(p, 1).cost == doctest::Approx(kmeans_cost(p, mu)));

  Dataset big(1, 2);
  big.add(std::vector<double>{0.0}, kRed, 8);
  big.add(std::vector<double>{1.0}, kBlue, 8);
  CHECK_THROWS_AS(brute_force_opt(big, 2), GuardError);
  CHECK_THROWS_AS(brute_force_opt(p, 4), GuardError);
}

TEST_CASE("property: brute force agrees with two independent enumerations") {
  Rng rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(4));
    const auto p = oracle::random_dataset(rng, 2, {n, n}, 10.0, 2);
    const std::size_t k = 1 + rng.below(3);
    const double got = brute_force_opt(p, k).cost;
    double want = oracle::kInf;
    for (int j = 1; j <= static_cast<int>(k); ++j) want = std::min(want, oracle::fair_opt(p, j));
    CHECK(got == doctest::Approx(want).epsilon(1e-9));

    // Constraint route: every balanced profile, best assignment to its
    // centroids, re-optimized until stable.
    double via_cover = oracle::kInf;
    for_each_fairness_constraint(p, k, Rational(1), Rational(1), [&](const ColoringConstraint& K) {
      Rng local(7);
      for (int start = 0; start < 8; ++start) {
        Centers c(2);
        for (std::size_t i = 0; i < k; ++i) {
          c.add(std::vector<double>{10 * local.uniform(), 10 * local.uniform()});
        }
        double last = oracle::kInf;
        for (int it = 0; it < 50; ++it) {
          const auto r = color_constrained_cost(p, K, c);
          if (!r) break;
          const auto fc = make_clustering(p, c, r->assignment);
          if (fc.cost >= last - 1e-15) break;
          last = fc.cost;
          Centers next(2);
          for (std::size_t i = 0; i < k; ++i) {
            std::vector<std::size_t> idx;
            std::vector<Weight> w;
            for (std::size_t a = 0; a < p.size(); ++a) {
              for (const auto& part : r->assignment[a]) {
                if (part.center == i) {
                  idx.push_back(a);
                  w.push_back(part.weight);
                }
              }
            }
            next.add(idx.empty() ? std::vector<double>(c[i].begin(), c[i].end()) : centroid(p, idx, w));
          }
          c = next;
        }
        via_cover = std::min(via_cover, last);
      }
    }, true);
    CHECK(got <= via_cover * (1 + 1e-9) + 1e-12);
  }
}

TEST_CASE("property: solver orderings, monotone costs, fairness") {
  Rng rng(32);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(30));
    const auto p = oracle::random_dataset(rng, 2, {n, n}, 10.0, 3);
    const std::size_t k = 1 + rng.below(4);
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const auto config = cfg(k, seed);
      const auto cklv = cklv_kmeanspp(p, config);
      const auto re = reassigned_cklv(p, config);
      const auto fair = fair_kmeanspp(p, config);
      const auto from_re = fair_kmeanspp(p, config, nullptr, &re.clustering.centers);
      CHECK(re.clustering.cost <= cklv.clustering.cost * (1 + 1e-12) + 1e-12);
      CHECK(from_re.clustering.cost <= re.clustering.cost * (1 + 1e-12) + 1e-12);
      CHECK(non_increasing(cklv.cost_history));
      CHECK(non_increasing(fair.cost_history));
      CHECK(non_increasing(from_re.cost_history));
      for (const auto* r : {&cklv, &re, &fair, &from_re}) {
        CHECK(check_fair(r->clustering, p, Rational(1), Rational(1)).fair);
        CHECK(r->clustering.cost == doctest::Approx(assignment_cost(p, r->clustering)).epsilon(1e-9));
        CHECK(r->clustering.centers.size() <= k);
      }
    }
  }
}

TEST_CASE("property: exhaustive ptas within twice the optimum") {
  Rng rng(33);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(5));
    const auto p = oracle::random_dataset(rng, 2, {n, n});
    const std::size_t k = 1 + rng.below(2);
    const double opt = brute_force_opt(p, k).cost;
    PtasOptions raw;
    raw.polish = false;
    const auto r = ptas(p, k, 1.0, raw);
    CHECK(r.clustering.cost <= 2.0 * opt * (1 + 1e-9) + 1e-12);
    CHECK(ptas(p, k, 1.0).clustering.cost <= r.clustering.cost * (1 + 1e-12) + 1e-12);
    CHECK(check_fair(r.clustering, p, Rational(1), Rational(1)).fair);
  }
}

TEST_CASE("seeded determinism") {
  Rng rng(34);
  const auto p = oracle::random_dataset(rng, 3, {40, 40}, 10.0, 2);
  for (auto solve : {cklv_kmeanspp, reassigned_cklv}) {
    const auto a = solve(p, cfg(3, 9), nullptr);
    const auto b = solve(p, cfg(3, 9), nullptr);
    CHECK(a.clustering.centers == b.clustering.centers);
    CHECK(a.clustering.assignment == b.clustering.assignment);
    CHECK(a.clustering.cost == b.clustering.cost);
  }
  const auto a = fair_kmeanspp(p, cfg(3, 9));
  const auto b = fair_kmeanspp(p, cfg(3, 9));
  CHECK(a.clustering.centers == b.clustering.centers);
  CHECK(a.cost_history == b.cost_history);
}

TEST_CASE("precomputed fairlets give the same result") {
  Rng rng(35);
  const auto p = oracle::random_dataset(rng, 2, {25, 25}, 10.0, 2);
  const auto f = compute_fairlets(p);
  CHECK(cklv_kmeanspp(p, cfg(2, 4), &f).clustering.cost == cklv_kmeanspp(p, cfg(2, 4)).clustering.cost);
  CHECK(fair_kmeanspp(p, cfg(2, 4), &f).clustering.cost == fair_kmeanspp(p, cfg(2, 4)).clustering.cost);
}
