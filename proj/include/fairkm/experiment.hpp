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


#ifndef FAIRKM_EXPERIMENT_HPP_
#define FAIRKM_EXPERIMENT_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fairkm/core.hpp"

namespace fairkm {

// ---- ingestion -------------------------------------------------------------

enum class CategoricalPolicy {
  kDrop,   // feature columns holding any non-numeric cell are dropped
  kError,  // a non-numeric feature cell is an error
};

struct IngestOptions {
  std::string color_column;
  // Feature columns to keep; empty keeps every column but the color column.
  std::vector<std::string> columns;
  CategoricalPolicy categorical = CategoricalPolicy::kDrop;
  bool balance = false;  // subsample the larger of two colors
  bool zscore = false;
  std::uint64_t seed = 0;
};

struct IngestResult {
  Dataset data;
  std::vector<std::string> feature_names;
  std::vector<std::string> color_labels;  // label of color i
  std::vector<std::string> dropped_columns;
  std::size_t rows_read = 0;
  std::size_t rows_missing = 0;   // dropped for a missing entry
  std::size_t rows_balanced = 0;  // removed by balancing
};

IngestResult ingest_csv(const std::string& path, const IngestOptions& options);
IngestResult parse_csv(std::istream& in, const IngestOptions& options);

// Uniform subsample without replacement of the larger color of a two-color
// unit-weight dataset down to the smaller one; original order is kept.
Dataset balance_colors(const Dataset& data, std::uint64_t seed);

// Exactly balanced two-color unit-weight data drawn around `components`
// Gaussian centers; each color has its own mixture weights.
Dataset synthetic_mixture(std::size_t n, std::size_t d, std::size_t components, std::uint64_t seed,
                          double spread = 10.0);

// ---- experiments -----------------------------------------------------------

enum class Algorithm { kCklv, kReassigned, kFair, kPtas };

const char* algorithm_name(Algorithm a);
std::optional<Algorithm> parse_algorithm(const std::string& name);

struct ExperimentConfig {
  std::vector<std::size_t> sizes;  // ascending subsample sizes; 0 means the full input
  std::vector<std::size_t> ks{2};
  std::vector<Algorithm> algorithms{Algorithm::kCklv, Algorithm::kReassigned, Algorithm::kFair};
  double epsilon = 0.2;
  std::size_t coreset_size = 0;  // 0 means 200 k
  std::size_t repetitions = 5;
  std::uint64_t seed = 0;
  bool run_input = true;
  bool run_coreset = true;
  std::size_t max_iterations = 100;
  std::size_t ptas_samples = 100;
  std::size_t workers = 1;
};

struct PhaseTimes {
  double coreset = 0.0;
  double fairlets = 0.0;
  double solve = 0.0;
  double assignment = 0.0;
};

struct RunRecord {
  std::string algorithm;
  std::string pipeline;  // "input" or "coreset"
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t repetition = 0;
  std::uint64_t seed = 0;
  // ok, skipped, guard_exceeded, infeasible or error; `message` says why.
  std::string status = "ok";
  std::string message;
  double cost = 0.0;
  double fairlet_cost = 0.0;  // matching cost of the evaluated input
  std::size_t coreset_points = 0;
  std::string evaluation;  // how `cost` is recomputed from `centers`
  Centers centers;
  PhaseTimes times;
};

struct AggregateRow {
  std::string algorithm;
  std::string pipeline;
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t runs = 0;
  double mean_cost = 0.0;
  double min_cost = 0.0;
  double mean_fairlet_cost = 0.0;
  // Mean cost over the input-pipeline mean of the same algorithm and cell.
  double ratio_to_input = 0.0;
  friend bool operator==(const AggregateRow&, const AggregateRow&) = default;
};

struct ExperimentReport {
  std::vector<RunRecord> runs;
  std::vector<AggregateRow> aggregates;
};

// Balanced subsample of the first n/2 reds and n/2 blues of a seeded
// permutation, so smaller sizes are nested in larger ones.
Dataset balanced_subsample(const Dataset& data, std::size_t n, std::uint64_t seed);

ExperimentReport run_experiment(const Dataset& data, const ExperimentConfig& config);

std::vector<AggregateRow> aggregate(const std::vector<RunRecord>& runs);

// Recomputes a run's cost from its stored centers on the dataset it ran on.
double recompute_cost(const Dataset& data, const RunRecord& run);

// runs.csv: one row per run, stable columns, no wall-clock values.
void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& runs);
std::vector<RunRecord> read_runs_csv(std::istream& in);
// series.csv: aggregates, one row per (algorithm, pipeline, n, k).
void write_series_csv(std::ostream& out, const std::vector<AggregateRow>& rows);
// timings.csv: per-run phase times in seconds.
void write_timings_csv(std::ostream& out, const std::vector<RunRecord>& runs);

// timing_series.csv: mean phase times per (algorithm, pipeline, n, k).
void write_timing_series_csv(std::ostream& out, const std::vector<RunRecord>& runs);

// Writes runs.csv, series.csv, timings.csv and timing_series.csv into
// `directory`, creating it if needed.
void emit_report(const ExperimentReport& report, const std::string& directory);

// Shortest text that parses back to the same double.
std::string format_double(double x);

}  // namespace fairkm

#endif  // FAIRKM_EXPERIMENT_HPP_
