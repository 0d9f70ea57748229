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


#include "fairkm/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include "fairkm/coreset.hpp"
#include "fairkm/errors.hpp"
#include "fairkm/fairassign.hpp"
#include "fairkm/fairlets.hpp"
#include "fairkm/random.hpp"
#include "fairkm/solvers.hpp"

namespace fairkm {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// ---- CSV -------------------------------------------------------------------

// Reads one record, honouring double quotes (including embedded newlines).
// Returns false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  std::string field;
  bool quoted = false;
  bool any = false;
  char ch;
  while (in.get(ch)) {
    any = true;
    if (quoted) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get();
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (ch == '\n') {
      break;
    } else if (ch != '\r') {
      field.push_back(ch);
    }
  }
  if (!any) return false;
  fields.push_back(std::move(field));
  return true;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

bool is_missing(const std::string& cell) {
  static const char* const kTokens[] = {"", "?", "na", "n/a", "nan", "null", "none"};
  std::string lower = trim(cell);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  return std::any_of(std::begin(kTokens), std::end(kTokens), [&](const char* t) { return lower == t; });
}

std::optional<double> parse_number(const std::string& cell) {
  std::string t = trim(cell);
  if (!t.empty() && t.front() == '+') t.erase(0, 1);
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty() || !std::isfinite(x)) return std::nullopt;
  return x;
}

double parse_double_field(const std::string& s) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw DomainError("malformed number '" + s + "'");
  return x;
}

std::uint64_t parse_unsigned_field(const std::string& s) {
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw DomainError("malformed integer '" + s + "'");
  return x;
}

Dataset zscore(const Dataset& data) {
  const std::size_t d = data.dim();
  std::vector<double> mean(d, 0.0), var(d, 0.0);
  const double n = static_cast<double>(data.total_weight());
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j) mean[j] += static_cast<double>(data.weight(i)) * data.point(i)[j];
  }
  for (auto& m : mean) m /= n;
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double dev = data.point(i)[j] - mean[j];
      var[j] += static_cast<double>(data.weight(i)) * dev * dev;
    }
  }
  Dataset out(d, data.num_colors());
  out.reserve(data.size());
  std::vector<double> row(d);
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double sd = std::sqrt(var[j] / n);
      row[j] = sd > 0.0 ? (data.point(i)[j] - mean[j]) / sd : 0.0;
    }
    out.add(row, data.color(i), data.weight(i));
  }
  return out;
}

// Fisher-Yates prefix of length m over [0, n).
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t m, Rng& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i < m; ++i) std::swap(idx[i], idx[i + rng.below(n - i)]);
  idx.resize(m);
  return idx;
}

void require_unit_two_color(const Dataset& data) {
  if (data.num_colors() != 2) throw BalanceError("balancing needs exactly two colors");
  for (auto w : data.weights()) {
    if (w != 1) throw UnsupportedError("balancing needs unit weights");
  }
}

Dataset select_rows(const Dataset& data, std::vector<std::size_t> rows) {
  std::sort(rows.begin(), rows.end());
  Dataset out(data.dim(), data.num_colors());
  out.reserve(rows.size());
  for (auto i : rows) out.add(data.point(i), data.color(i), data.weight(i));
  return out;
}

// ---- experiment cells --------------------------------------------------------

struct InputCache {
  std::size_t n = 0;
  Dataset data;
  std::optional<FairletDecomposition> fairlets;
  double fairlet_seconds = 0.0;
};

std::string centers_field(const Centers& centers) {
  std::string out;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    if (c > 0) out.push_back('|');
    for (std::size_t j = 0; j < centers.dim(); ++j) {
      if (j > 0) out.push_back(';');
      out += format_double(centers[c][j]);
    }
  }
  return out;
}

Centers parse_centers(const std::string& s) {
  if (s.empty()) return Centers();
  std::vector<std::vector<double>> rows;
  std::stringstream outer(s);
  std::string row;
  while (std::getline(outer, row, '|')) {
    std::vector<double> values;
    std::stringstream inner(row);
    std::string cell;
    while (std::getline(inner, cell, ';')) values.push_back(parse_double_field(cell));
    rows.push_back(std::move(values));
  }
  Centers out(rows.front().size());
  for (const auto& r : rows) {
    if (r.size() != out.dim()) throw DomainError("ragged centers field");
    out.add(r);
  }
  return out;
}

FairSolveResult solve(Algorithm algorithm, const Dataset& data, const SolverConfig& config,
                      const FairletDecomposition* fairlets, const ExperimentConfig& ec) {
  switch (algorithm) {
    case Algorithm::kCklv:
      return cklv_kmeanspp(data, config, fairlets);
    case Algorithm::kReassigned:
      return reassigned_cklv(data, config, fairlets);
    case Algorithm::kFair:
      return fair_kmeanspp(data, config, fairlets);
    case Algorithm::kPtas: {
      PtasOptions options;
      options.samples = ec.ptas_samples;
      options.seed = config.seed;
      return ptas(data, config.k, ec.epsilon, options);
    }
  }
  throw DomainError("unknown algorithm");
}

template <class F>
void guarded(RunRecord& record, F&& body) {
  try {
    body();
  } catch (const GuardError& e) {
    record.status = "guard_exceeded";
    record.message = e.what();
  } catch (const InfeasibleError& e) {
    record.status = "infeasible";
    record.message = e.what();
  } catch (const BalanceError& e) {
    record.status = "infeasible";
    record.message = e.what();
  } catch (const std::exception& e) {
    record.status = "error";
    record.message = e.what();
  }
}

std::vector<RunRecord> run_cell(const InputCache& input, std::size_t k, std::size_t rep,
                                const ExperimentConfig& ec) {
  std::vector<RunRecord> out;
  const std::uint64_t seed = splitmix64(ec.seed ^ splitmix64(rep + 1));
  SolverConfig config;
  config.k = k;
  config.max_iterations = ec.max_iterations;
  config.seed = seed;
  const double fairlet_cost = input.fairlets ? input.fairlets->matching_cost : 0.0;
  auto base = [&](Algorithm a, const char* pipeline) {
    RunRecord r;
    r.algorithm = algorithm_name(a);
    r.pipeline = pipeline;
    r.n = input.n;
    r.k = k;
    r.repetition = rep;
    r.seed = seed;
    r.fairlet_cost = fairlet_cost;
    return r;
  };

  for (Algorithm a : ec.algorithms) {
    RunRecord r = base(a, "input");
    if (!ec.run_input) {
      r.status = "skipped";
      out.push_back(std::move(r));
      continue;
    }
    r.evaluation = a == Algorithm::kCklv ? "fairlet" : "fair_assignment";
    guarded(r, [&] {
      const FairSolveResult res = solve(a, input.data, config, &*input.fairlets, ec);
      r.cost = res.clustering.cost;
      r.centers = res.clustering.centers;
      r.times.fairlets = a == Algorithm::kPtas ? 0.0 : input.fairlet_seconds;
      r.times.solve = res.timings.solve;
      r.times.assignment = res.timings.assignment;
    });
    out.push_back(std::move(r));
  }

  if (!ec.run_coreset) return out;
  std::optional<FairCoreset> coreset;
  double coreset_seconds = 0.0;
  std::string coreset_error;
  try {
    CoresetOptions options;
    options.seed = seed;
    options.size_target = ec.coreset_size == 0 ? 200 * k : ec.coreset_size;
    const auto start = Clock::now();
    coreset = build_fair_coreset(input.data, k, ec.epsilon, options);
    coreset_seconds = seconds_since(start);
  } catch (const std::exception& e) {
    coreset_error = e.what();
  }
  for (Algorithm a : ec.algorithms) {
    RunRecord r = base(a, "coreset");
    r.evaluation = "fair_assignment";
    if (!coreset) {
      r.status = "error";
      r.message = coreset_error;
      out.push_back(std::move(r));
      continue;
    }
    r.coreset_points = coreset->summary.size();
    r.times.coreset = coreset_seconds;
    guarded(r, [&] {
      const FairSolveResult res = solve(a, coreset->summary, config, nullptr, ec);
      r.times.fairlets = res.timings.fairlets;
      r.times.solve = res.timings.solve;
      r.times.assignment = res.timings.assignment;
      const auto start = Clock::now();
      const FairClustering eval = fair_assignment(input.data, res.clustering.centers);
      r.times.assignment += seconds_since(start);
      r.cost = eval.cost;
      r.centers = res.clustering.centers;
    });
    out.push_back(std::move(r));
  }
  return out;
}

using CellKey = std::tuple<std::string, std::string, std::size_t, std::size_t>;

}  // namespace

// ---- ingestion -------------------------------------------------------------

IngestResult parse_csv(std::istream& in, const IngestOptions& options) {
  std::vector<std::string> header;
  if (!read_record(in, header)) throw DomainError("empty CSV input");
  for (auto& h : header) h = trim(h);
  const auto color_it = std::find(header.begin(), header.end(), options.color_column);
  if (options.color_column.empty() || color_it == header.end()) {
    throw DomainError("color column '" + options.color_column + "' not found");
  }
  const std::size_t color_col = static_cast<std::size_t>(color_it - header.begin());

  std::vector<std::size_t> candidates;
  if (options.columns.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c != color_col) candidates.push_back(c);
    }
  } else {
    for (const auto& name : options.columns) {
      const auto it = std::find(header.begin(), header.end(), name);
      if (it == header.end()) throw DomainError("column '" + name + "' not found");
      if (it == color_it) throw DomainError("color column cannot be a feature");
      candidates.push_back(static_cast<std::size_t>(it - header.begin()));
    }
  }

  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> record;
  IngestResult result;
  while (read_record(in, record)) {
    if (record.size() == 1 && trim(record[0]).empty()) continue;
    if (record.size() != header.size()) {
      throw DomainError("row " + std::to_string(rows.size() + 2) + " has " + std::to_string(record.size()) +
                        " fields, expected " + std::to_string(header.size()));
    }
    rows.push_back(record);
  }
  result.rows_read = rows.size();

  std::vector<std::size_t> features;
  for (auto c : candidates) {
    bool numeric = true;
    for (std::size_t r = 0; r < rows.size() && numeric; ++r) {
      const auto& cell = rows[r][c];
      if (is_missing(cell) || parse_number(cell)) continue;
      if (options.categorical == CategoricalPolicy::kError) {
        throw DomainError("non-numeric value '" + cell + "' in column '" + header[c] + "' at row " +
                          std::to_string(r + 2));
      }
      numeric = false;
    }
    if (numeric) {
      features.push_back(c);
    } else {
      result.dropped_columns.push_back(header[c]);
    }
  }
  if (features.empty()) throw DomainError("no numeric feature columns");
  for (auto c : features) result.feature_names.push_back(header[c]);

  std::vector<std::size_t> kept;
  std::vector<std::string> labels;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    bool missing = is_missing(rows[r][color_col]);
    for (auto c : features) missing = missing || is_missing(rows[r][c]);
    if (missing) {
      ++result.rows_missing;
    } else {
      kept.push_back(r);
      labels.push_back(trim(rows[r][color_col]));
    }
  }
  if (kept.empty()) throw DomainError("no usable rows");

  std::vector<std::string> distinct = labels;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  result.color_labels = distinct;

  Dataset data(features.size(), static_cast<int>(distinct.size()));
  data.reserve(kept.size());
  std::vector<double> point(features.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    for (std::size_t j = 0; j < features.size(); ++j) point[j] = *parse_number(rows[kept[i]][features[j]]);
    const auto color = std::lower_bound(distinct.begin(), distinct.end(), labels[i]) - distinct.begin();
    data.add(point, static_cast<Color>(color));
  }
  if (options.balance) {
    const std::size_t before = data.size();
    data = balance_colors(data, options.seed);
    result.rows_balanced = before - data.size();
  }
  if (options.zscore) data = zscore(data);
  result.data = std::move(data);
  return result;
}

IngestResult ingest_csv(const std::string& path, const IngestOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot read '" + path + "'");
  return parse_csv(in, options);
}

Dataset balance_colors(const Dataset& data, std::uint64_t seed) {
  require_unit_two_color(data);
  const auto red = data.indices_of_color(kRed);
  const auto blue = data.indices_of_color(kBlue);
  if (red.empty() || blue.empty()) throw BalanceError("cannot balance: one color is absent");
  const bool red_larger = red.size() > blue.size();
  const auto& larger = red_larger ? red : blue;
  const auto& smaller = red_larger ? blue : red;
  Rng rng(seed);
  std::vector<std::size_t> rows = smaller;
  for (auto pos : sample_without_replacement(larger.size(), smaller.size(), rng)) rows.push_back(larger[pos]);
  return select_rows(data, std::move(rows));
}

Dataset synthetic_mixture(std::size_t n, std::size_t d, std::size_t components, std::uint64_t seed,
                          double spread) {
  if (n == 0 || n % 2 != 0) throw DomainError("synthetic size must be positive and even");
  if (d == 0 || components == 0) throw DomainError("dimension and components must be positive");
  Rng rng(seed);
  std::vector<double> means(components * d);
  for (auto& x : means) x = spread * (2.0 * rng.uniform() - 1.0);
  Dataset out(d, 2);
  out.reserve(n);
  std::vector<double> p(d);
  for (Color color : {kRed, kBlue}) {
    std::vector<double> cumulative(components);
    double acc = 0.0;
    for (std::size_t c = 0; c < components; ++c) {
      acc += static_cast<double>(color == kRed ? c + 1 : components - c);
      cumulative[c] = acc;
    }
    for (std::size_t i = 0; i < n / 2; ++i) {
      const double u = rng.uniform() * acc;
      const std::size_t c = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                                                     cumulative.begin());
      const std::size_t comp = std::min(c, components - 1);
      for (std::size_t j = 0; j < d; ++j) p[j] = means[comp * d + j] + rng.normal();
      out.add(p, color);
    }
  }
  return out;
}

// ---- experiments -----------------------------------------------------------

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kCklv:
      return "cklv";
    case Algorithm::kReassigned:
      return "reassigned";
    case Algorithm::kFair:
      return "fair";
    case Algorithm::kPtas:
      return "ptas";
  }
  return "unknown";
}

std::optional<Algorithm> parse_algorithm(const std::string& name) {
  for (Algorithm a : {Algorithm::kCklv, Algorithm::kReassigned, Algorithm::kFair, Algorithm::kPtas}) {
    if (name == algorithm_name(a)) return a;
  }
  return std::nullopt;
}

Dataset balanced_subsample(const Dataset& data, std::size_t n, std::uint64_t seed) {
  require_unit_two_color(data);
  if (n == 0 || n % 2 != 0) throw DomainError("subsample size must be positive and even");
  const auto red = data.indices_of_color(kRed);
  const auto blue = data.indices_of_color(kBlue);
  if (n / 2 > red.size() || n / 2 > blue.size()) {
    throw DomainError("subsample size " + std::to_string(n) + " exceeds twice the smaller color count");
  }
  Rng rng_red(splitmix64(seed) ^ 1);
  Rng rng_blue(splitmix64(seed) ^ 2);
  const auto red_order = sample_without_replacement(red.size(), red.size(), rng_red);
  const auto blue_order = sample_without_replacement(blue.size(), blue.size(), rng_blue);
  std::vector<std::size_t> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n / 2; ++i) {
    rows.push_back(red[red_order[i]]);
    rows.push_back(blue[blue_order[i]]);
  }
  return select_rows(data, std::move(rows));
}

ExperimentReport run_experiment(const Dataset& data, const ExperimentConfig& config) {
  if (config.repetitions == 0) throw DomainError("repetitions must be at least 1");
  if (config.ks.empty() || config.algorithms.empty()) throw DomainError("empty k or algorithm list");
  if (!(config.epsilon > 0.0 && config.epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
  for (auto k : config.ks) {
    if (k == 0) throw DomainError("k must be positive");
  }
  std::vector<std::size_t> sizes = config.sizes;
  if (sizes.empty()) sizes.push_back(0);
  if (!std::is_sorted(sizes.begin(), sizes.end())) throw DomainError("subsample sizes must be ascending");
  require_two_color_balanced(data);

  std::vector<InputCache> inputs;
  for (auto n : sizes) {
    InputCache cache;
    cache.data = n == 0 ? data : balanced_subsample(data, n, config.seed);
    cache.n = cache.data.total_weight();
    const auto start = Clock::now();
    cache.fairlets = compute_fairlets(cache.data);
    cache.fairlet_seconds = seconds_since(start);
    inputs.push_back(std::move(cache));
  }

  struct Cell {
    std::size_t input, k, rep;
  };
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    for (auto k : config.ks) {
      for (std::size_t r = 0; r < config.repetitions; ++r) cells.push_back({i, k, r});
    }
  }
  std::vector<std::vector<RunRecord>> results(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next++; c < cells.size(); c = next++) {
      results[c] = run_cell(inputs[cells[c].input], cells[c].k, cells[c].rep, config);
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(config.workers, 1, cells.size());
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  ExperimentReport report;
  for (auto& cell : results) {
    for (auto& r : cell) report.runs.push_back(std::move(r));
  }
  report.aggregates = aggregate(report.runs);
  return report;
}

std::vector<AggregateRow> aggregate(const std::vector<RunRecord>& runs) {
  std::map<CellKey, AggregateRow> cells;
  std::vector<CellKey> order;
  for (const auto& r : runs) {
    if (r.status != "ok") continue;
    const CellKey key{r.algorithm, r.pipeline, r.n, r.k};
    auto [it, inserted] = cells.try_emplace(key);
    AggregateRow& row = it->second;
    if (inserted) {
      order.push_back(key);
      row.algorithm = r.algorithm;
      row.pipeline = r.pipeline;
      row.n = r.n;
      row.k = r.k;
      row.min_cost = r.cost;
    }
    ++row.runs;
    row.mean_cost += r.cost;
    row.mean_fairlet_cost += r.fairlet_cost;
    row.min_cost = std::min(row.min_cost, r.cost);
  }
  for (auto& [key, row] : cells) {
    row.mean_cost /= static_cast<double>(row.runs);
    row.mean_fairlet_cost /= static_cast<double>(row.runs);
  }
  std::vector<AggregateRow> out;
  for (const auto& key : order) {
    AggregateRow row = cells.at(key);
    const auto base = cells.find(CellKey{row.algorithm, "input", row.n, row.k});
    row.ratio_to_input = base == cells.end() || base->second.mean_cost == 0.0
                             ? std::numeric_limits<double>::quiet_NaN()
                             : row.mean_cost / base->second.mean_cost;
    out.push_back(row);
  }
  return out;
}

double recompute_cost(const Dataset& data, const RunRecord& run) {
  if (run.evaluation == "fair_assignment") return fair_assignment(data, run.centers).cost;
  if (run.evaluation == "fairlet") {
    const FairletDecomposition fairlets = compute_fairlets(data);
    std::vector<std::size_t> labels(fairlets.representatives.size());
    for (std::size_t f = 0; f < labels.size(); ++f) {
      labels[f] = nearest_center(fairlets.representatives.point(f), run.centers).index;
    }
    return assign_fairlets(data, fairlets, run.centers, labels).cost;
  }
  throw DomainError("run has no evaluation rule");
}

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

namespace {

const char* const kRunColumns =
    "algorithm,pipeline,n,k,repetition,seed,status,cost,fairlet_cost,coreset_points,evaluation,centers,message";

}  // namespace

void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& runs) {
  out << kRunColumns << '\n';
  for (const auto& r : runs) {
    out << r.algorithm << ',' << r.pipeline << ',' << r.n << ',' << r.k << ',' << r.repetition << ',' << r.seed
        << ',' << r.status << ',' << format_double(r.cost) << ',' << format_double(r.fairlet_cost) << ','
        << r.coreset_points << ',' << r.evaluation << ',' << centers_field(r.centers) << ','
        << csv_field(r.message) << '\n';
  }
}

std::vector<RunRecord> read_runs_csv(std::istream& in) {
  std::vector<std::string> fields;
  if (!read_record(in, fields)) throw DomainError("empty runs table");
  std::string header;
  for (std::size_t i = 0; i < fields.size(); ++i) header += (i ? "," : "") + fields[i];
  if (header != kRunColumns) throw DomainError("unexpected runs header");
  std::vector<RunRecord> runs;
  while (read_record(in, fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != 13) throw DomainError("runs row has " + std::to_string(fields.size()) + " fields");
    RunRecord r;
    r.algorithm = fields[0];
    r.pipeline = fields[1];
    r.n = parse_unsigned_field(fields[2]);
    r.k = parse_unsigned_field(fields[3]);
    r.repetition = parse_unsigned_field(fields[4]);
    r.seed = parse_unsigned_field(fields[5]);
    r.status = fields[6];
    r.cost = parse_double_field(fields[7]);
    r.fairlet_cost = parse_double_field(fields[8]);
    r.coreset_points = parse_unsigned_field(fields[9]);
    r.evaluation = fields[10];
    r.centers = parse_centers(fields[11]);
    r.message = fields[12];
    runs.push_back(std::move(r));
  }
  return runs;
}

void write_series_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << "algorithm,pipeline,n,k,runs,mean_cost,min_cost,mean_fairlet_cost,ratio_to_input\n";
  for (const auto& r : rows) {
    out << r.algorithm << ',' << r.pipeline << ',' << r.n << ',' << r.k << ',' << r.runs << ','
        << format_double(r.mean_cost) << ',' << format_double(r.min_cost) << ','
        << format_double(r.mean_fairlet_cost) << ',' << format_double(r.ratio_to_input) << '\n';
  }
}

void write_timings_csv(std::ostream& out, const std::vector<RunRecord>& runs) {
  out << "algorithm,pipeline,n,k,repetition,coreset_s,fairlets_s,solve_s,assignment_s,total_s\n";
  for (const auto& r : runs) {
    const auto& t = r.times;
    out << r.algorithm << ',' << r.pipeline << ',' << r.n << ',' << r.k << ',' << r.repetition << ','
        << format_double(t.coreset) << ',' << format_double(t.fairlets) << ',' << format_double(t.solve) << ','
        << format_double(t.assignment) << ',' << format_double(t.coreset + t.fairlets + t.solve + t.assignment)
        << '\n';
  }
}

void write_timing_series_csv(std::ostream& out, const std::vector<RunRecord>& runs) {
  std::map<CellKey, std::pair<PhaseTimes, std::size_t>> cells;
  std::vector<CellKey> order;
  for (const auto& r : runs) {
    if (r.status != "ok") continue;
    const CellKey key{r.algorithm, r.pipeline, r.n, r.k};
    auto [it, inserted] = cells.try_emplace(key);
    if (inserted) order.push_back(key);
    auto& [t, count] = it->second;
    t.coreset += r.times.coreset;
    t.fairlets += r.times.fairlets;
    t.solve += r.times.solve;
    t.assignment += r.times.assignment;
    ++count;
  }
  out << "algorithm,pipeline,n,k,runs,mean_coreset_s,mean_fairlets_s,mean_solve_s,mean_assignment_s,mean_total_s\n";
  for (const auto& key : order) {
    const auto& [t, count] = cells.at(key);
    const double c = static_cast<double>(count);
    out << std::get<0>(key) << ',' << std::get<1>(key) << ',' << std::get<2>(key) << ',' << std::get<3>(key) << ','
        << count << ',' << format_double(t.coreset / c) << ',' << format_double(t.fairlets / c) << ','
        << format_double(t.solve / c) << ',' << format_double(t.assignment / c) << ','
        << format_double((t.coreset + t.fairlets + t.solve + t.assignment) / c) << '\n';
  }
}

void emit_report(const ExperimentReport& report, const std::string& directory) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw DomainError("cannot create '" + directory + "': " + ec.message());
  auto open = [&](const char* name) {
    std::ofstream out(fs::path(directory) / name, std::ios::binary);
    if (!out) throw DomainError("cannot write '" + (fs::path(directory) / name).string() + "'");
    return out;
  };
  {
    auto out = open("runs.csv");
    write_runs_csv(out, report.runs);
  }
  {
    auto out = open("series.csv");
    write_series_csv(out, report.aggregates);
  }
  {
    auto out = open("timings.csv");
    write_timings_csv(out, report.runs);
  }
  {
    auto out = open("timing_series.csv");
    write_timing_series_csv(out, report.runs);
  }
}

}  // namespace fairkm
