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
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fairkm/errors.hpp"
#include "fairkm/experiment.hpp"
#include "fairkm/fairlets.hpp"

using namespace fairkm;

namespace {

IngestResult parse(const std::string& text, IngestOptions options) {
  std::istringstream in(text);
  return parse_csv(in, options);
}

IngestOptions by_color(const std::string& column) {
  IngestOptions o;
  o.color_column = column;
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.sizes = {40, 80};
  c.ks = {2};
  c.repetitions = 3;
  c.seed = 11;
  c.coreset_size = 30;
  c.max_iterations = 20;
  return c;
}

}  // namespace

TEST_CASE("ingest: four rows, two features, two labels") {
  const auto r = parse("x,y,g\n1,2,a\n3,4,b\n5,6,a\n7,8,b\n", by_color("g"));
  CHECK(r.data.dim() == 2);
  CHECK(r.data.num_colors() == 2);
  CHECK(r.data.size() == 4);
  CHECK(r.feature_names == std::vector<std::string>{"x", "y"});
  CHECK(r.color_labels == std::vector<std::string>{"a", "b"});
  CHECK(r.data.color(1) == 1);
  CHECK(r.data.point(2)[1] == 6.0);
}

TEST_CASE("ingest: missing cells drop the row and are counted") {
  const auto r = parse("x,y,g\n1,2,a\n3,?,b\n5,6,a\n7,8,b\n", by_color("g"));
  CHECK(r.rows_read == 4);
  CHECK(r.rows_missing == 1);
  CHECK(r.data.size() == 3);
  const auto blank = parse("x,y,g\n1,,a\n3,4,NA\n5,6,a\n", by_color("g"));
  CHECK(blank.rows_missing == 2);
  CHECK(blank.data.size() == 1);
}

TEST_CASE("ingest: balancing equalizes the colors") {
  std::string text = "x,g\n";
  for (int i = 0; i < 9; ++i) text += std::to_string(i) + ",r\n";
  for (int i = 0; i < 4; ++i) text += std::to_string(100 + i) + ",s\n";
  IngestOptions o = by_color("g");
  o.balance = true;
  o.seed = 3;
  const auto r = parse(text, o);
  CHECK(r.data.size() == 8);
  CHECK(r.data.color_weight(0) == 4);
  CHECK(r.data.color_weight(1) == 4);
  CHECK(r.rows_balanced == 5);
  o.seed = 4;
  CHECK(parse(text, o).data.size() == 8);
}

TEST_CASE("ingest: categorical columns are dropped or rejected") {
  const std::string text = "x,kind,g\n1,red,a\n2,blue,b\n";
  const auto r = parse(text, by_color("g"));
  CHECK(r.feature_names == std::vector<std::string>{"x"});
  CHECK(r.dropped_columns == std::vector<std::string>{"kind"});
  IngestOptions strict = by_color("g");
  strict.categorical = CategoricalPolicy::kError;
  CHECK_THROWS_AS(parse(text, strict), DomainError);
}

TEST_CASE("ingest: quoted fields, CRLF and column selection") {
  const auto r = parse("\"a,b\",y,g\r\n\"1\",2,\"x y\"\r\n3,4,z\r\n", [] {
    IngestOptions o = by_color("g");
    o.columns = {"y"};
    return o;
  }());
  CHECK(r.feature_names == std::vector<std::string>{"y"});
  CHECK(r.color_labels == std::vector<std::string>{"x y", "z"});
  CHECK(r.data.point(1)[0] == 4.0);
}

TEST_CASE("ingest: errors") {
  CHECK_THROWS_AS(parse("x,y\n1,2\n", by_color("g")), DomainError);
  CHECK_THROWS_AS(parse("x,g\n?,a\n", by_color("g")), DomainError);
  CHECK_THROWS_AS(parse("x,g\n1,a,3\n", by_color("g")), DomainError);
  CHECK_THROWS_AS(parse("", by_color("g")), DomainError);
  CHECK_THROWS_AS(ingest_csv("/nonexistent/file.csv", by_color("g")), DomainError);
  IngestOptions o = by_color("g");
  o.balance = true;
  CHECK_THROWS_AS(parse("x,g\n1,a\n2,b\n3,c\n", o), BalanceError);
}

TEST_CASE("ingest: z-score") {
  IngestOptions o = by_color("g");
  o.zscore = true;
  const auto r = parse("x,g\n1,a\n3,b\n5,a\n7,b\n", o);
  double sum = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    sum += r.data.point(i)[0];
    sq += r.data.point(i)[0] * r.data.point(i)[0];
  }
  CHECK(sum == doctest::Approx(0.0));
  CHECK(sq / 4.0 == doctest::Approx(1.0));
}

TEST_CASE("synthetic mixture is balanced and deterministic") {
  const Dataset a = synthetic_mixture(200, 3, 4, 9);
  CHECK(a.size() == 200);
  CHECK(a.color_weight(0) == 100);
  CHECK(a.color_weight(1) == 100);
  CHECK(a == synthetic_mixture(200, 3, 4, 9));
  CHECK_FALSE(a == synthetic_mixture(200, 3, 4, 10));
  CHECK_THROWS_AS(synthetic_mixture(7, 3, 4, 9), DomainError);
}

TEST_CASE("balanced subsamples are nested") {
  const Dataset data = synthetic_mixture(300, 2, 3, 5);
  const Dataset small = balanced_subsample(data, 40, 1);
  const Dataset large = balanced_subsample(data, 100, 1);
  CHECK(small.color_weight(0) == 20);
  CHECK(large.color_weight(1) == 50);
  for (std::size_t i = 0; i < small.size(); ++i) {
    bool found = false;
    for (std::size_t j = 0; j < large.size() && !found; ++j) {
      found = std::equal(small.point(i).begin(), small.point(i).end(), large.point(j).begin()) &&
              small.color(i) == large.color(j);
    }
    CHECK(found);
  }
  CHECK_THROWS_AS(balanced_subsample(data, 302, 1), DomainError);
  CHECK_THROWS_AS(balanced_subsample(data, 41, 1), DomainError);
}

TEST_CASE("format_double round-trips") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 123456789.125, -2.5}) {
    CHECK(std::stod(format_double(x)) == x);
  }
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("experiment: records, aggregates and recomputable costs") {
  const Dataset data = synthetic_mixture(120, 2, 3, 21);
  const ExperimentConfig config = small_config();
  const ExperimentReport report = run_experiment(data, config);
  // 2 sizes x 1 k x 3 reps x 3 algorithms x 2 pipelines.
  REQUIRE(report.runs.size() == 36);
  CHECK(report.aggregates.size() == 12);
  for (const auto& row : report.aggregates) {
    CHECK(row.runs == 3);
    CHECK(row.min_cost <= row.mean_cost);
    if (row.pipeline == "input") CHECK(row.ratio_to_input == 1.0);
  }
  for (const auto& run : report.runs) {
    REQUIRE(run.status == "ok");
    const Dataset input = balanced_subsample(data, run.n, config.seed);
    const double again = recompute_cost(input, run);
    CHECK(std::abs(again - run.cost) <= 1e-9 * std::max(1.0, run.cost));
    CHECK(run.fairlet_cost <= run.cost * (1 + 1e-12));
    CHECK(run.fairlet_cost == doctest::Approx(compute_fairlets(input).matching_cost));
    if (run.pipeline == "coreset") CHECK(run.coreset_points <= 30);
  }
}

TEST_CASE("experiment: coreset-only marks the input pipeline skipped") {
  const Dataset data = synthetic_mixture(60, 2, 2, 2);
  ExperimentConfig config = small_config();
  config.sizes = {0};
  config.run_input = false;
  config.repetitions = 5;
  const auto report = run_experiment(data, config);
  std::size_t skipped = 0;
  for (const auto& r : report.runs) {
    if (r.pipeline == "input") {
      CHECK(r.status == "skipped");
      ++skipped;
    } else {
      CHECK(r.status == "ok");
      CHECK(r.n == 60);
    }
  }
  CHECK(skipped == 15);
  for (const auto& row : report.aggregates) {
    CHECK(row.pipeline == "coreset");
    CHECK(row.runs == 5);
    CHECK(std::isnan(row.ratio_to_input));
  }
}

TEST_CASE("experiment: solver failures stay per run") {
  const Dataset data = synthetic_mixture(40, 2, 2, 2);
  ExperimentConfig config = small_config();
  config.sizes = {0};
  config.repetitions = 1;
  config.algorithms = {Algorithm::kFair};
  config.ks = {2, 50};  // 50 centers cannot all be fair on 40 points
  const auto report = run_experiment(data, config);
  CHECK(report.runs.size() == 4);
  bool any_ok = false;
  for (const auto& r : report.runs) any_ok = any_ok || r.status == "ok";
  CHECK(any_ok);
}

TEST_CASE("experiment: config validation") {
  const Dataset data = synthetic_mixture(40, 2, 2, 2);
  ExperimentConfig config = small_config();
  config.repetitions = 0;
  CHECK_THROWS_AS(run_experiment(data, config), DomainError);
  config = small_config();
  config.sizes = {80, 40};
  CHECK_THROWS_AS(run_experiment(data, config), DomainError);
  config = small_config();
  config.epsilon = 0.0;
  CHECK_THROWS_AS(run_experiment(data, config), DomainError);
}

TEST_CASE("experiment: deterministic and independent of workers") {
  const Dataset data = synthetic_mixture(120, 2, 3, 4);
  ExperimentConfig config = small_config();
  std::ostringstream a, b, c;
  write_runs_csv(a, run_experiment(data, config).runs);
  write_runs_csv(b, run_experiment(data, config).runs);
  config.workers = 3;
  write_runs_csv(c, run_experiment(data, config).runs);
  CHECK(a.str() == b.str());
  CHECK(a.str() == c.str());
}

TEST_CASE("report: round trip and emitted files") {
  const Dataset data = synthetic_mixture(80, 2, 2, 8);
  ExperimentConfig config = small_config();
  config.sizes = {40};
  config.algorithms = {Algorithm::kCklv, Algorithm::kPtas};
  const ExperimentReport report = run_experiment(data, config);

  std::stringstream table;
  write_runs_csv(table, report.runs);
  const auto parsed = read_runs_csv(table);
  REQUIRE(parsed.size() == report.runs.size());
  CHECK(aggregate(parsed) == report.aggregates);
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    CHECK(parsed[i].centers == report.runs[i].centers);
    CHECK(parsed[i].cost == report.runs[i].cost);
  }

  const auto dir = std::filesystem::temp_directory_path() / "fairkm_report_test";
  std::filesystem::remove_all(dir);
  emit_report(report, dir.string());
  for (const char* name : {"runs.csv", "series.csv", "timings.csv", "timing_series.csv"}) {
    CHECK(std::filesystem::exists(dir / name));
  }
  std::ostringstream series;
  write_series_csv(series, report.aggregates);
  CHECK(slurp(dir / "series.csv") == series.str());
  std::filesystem::remove_all(dir);
}

TEST_CASE("report: empty aggregates give a header-only table") {
  std::ostringstream out;
  write_series_csv(out, {});
  CHECK(out.str() == "algorithm,pipeline,n,k,runs,mean_cost,min_cost,mean_fairlet_cost,ratio_to_input\n");
  std::istringstream runs("algorithm,pipeline,n,k,repetition,seed,status,cost,fairlet_cost,coreset_points,"
                          "evaluation,centers,message\n");
  CHECK(read_runs_csv(runs).empty());
}

TEST_CASE("report: messages with commas survive") {
  RunRecord r;
  r.algorithm = "fair";
  r.pipeline = "input";
  r.status = "error";
  r.message = "bad, \"quoted\" thing";
  std::stringstream table;
  write_runs_csv(table, {r});
  const auto back = read_runs_csv(table);
  REQUIRE(back.size() == 1);
  CHECK(back[0].message == r.message);
  CHECK(back[0].centers.size() == 0);
}
