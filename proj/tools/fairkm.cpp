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


// Command line front end: ingest, coreset, cluster, experiment, verify.
//
// Exit codes: 0 success, 1 verification found violations, 2 configuration
// error, 3 infeasible or unbalanced input, 4 enumeration guard exceeded.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fairkm/coreset.hpp"
#include "fairkm/errors.hpp"
#include "fairkm/experiment.hpp"
#include "fairkm/fairassign.hpp"
#include "fairkm/fairlets.hpp"
#include "fairkm/solvers.hpp"
#include "json.hpp"

namespace {

using fairkm::Dataset;
using json = nlohmann::ordered_json;

constexpr int kExitViolations = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitGuard = 4;

struct InputArgs {
  std::string path;
  std::string color_column;
  std::vector<std::string> columns;
  std::string categorical = "drop";
  bool balance = false;
  bool zscore = false;
};

void add_input_args(CLI::App* cmd, InputArgs& in, bool required = true) {
  auto* path = cmd->add_option("input", in.path, "CSV file with a header row");
  if (required) path->required();
  cmd->add_option("--color-col", in.color_column, "Name of the color column");
  cmd->add_option("--columns", in.columns, "Feature columns to keep (default: all numeric)")->delimiter(',');
  cmd->add_option("--categorical", in.categorical, "Non-numeric feature columns: drop or error")
      ->check(CLI::IsMember({"drop", "error"}));
  cmd->add_flag("--balance", in.balance, "Subsample the larger color to equal the smaller");
  cmd->add_flag("--zscore", in.zscore, "Standardize every feature column");
}

fairkm::IngestResult load(const InputArgs& in, std::uint64_t seed) {
  if (in.color_column.empty()) throw fairkm::DomainError("--color-col is required");
  fairkm::IngestOptions o;
  o.color_column = in.color_column;
  o.columns = in.columns;
  o.categorical = in.categorical == "error" ? fairkm::CategoricalPolicy::kError : fairkm::CategoricalPolicy::kDrop;
  o.balance = in.balance;
  o.zscore = in.zscore;
  o.seed = seed;
  return fairkm::ingest_csv(in.path, o);
}

json ingest_summary(const fairkm::IngestResult& r) {
  json colors = json::array();
  for (std::size_t c = 0; c < r.color_labels.size(); ++c) {
    colors.push_back({{"label", r.color_labels[c]}, {"weight", r.data.color_weight(static_cast<int>(c))}});
  }
  return {{"rows_read", r.rows_read},
          {"rows_dropped_missing", r.rows_missing},
          {"rows_removed_balance", r.rows_balanced},
          {"points", r.data.size()},
          {"dimension", r.data.dim()},
          {"features", r.feature_names},
          {"dropped_columns", r.dropped_columns},
          {"colors", colors}};
}

json centers_json(const fairkm::Centers& centers) {
  json out = json::array();
  for (std::size_t c = 0; c < centers.size(); ++c) {
    out.push_back(std::vector<double>(centers[c].begin(), centers[c].end()));
  }
  return out;
}

void emit_json(const json& j, const std::string& output) {
  if (output.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(output);
  if (!out) throw fairkm::DomainError("cannot write '" + output + "'");
  out << j.dump(2) << '\n';
}

void write_dataset_csv(const fairkm::IngestResult& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw fairkm::DomainError("cannot write '" + path + "'");
  for (const auto& name : r.feature_names) out << name << ',';
  out << "color\n";
  for (std::size_t i = 0; i < r.data.size(); ++i) {
    for (double x : r.data.point(i)) out << fairkm::format_double(x) << ',';
    out << r.color_labels[static_cast<std::size_t>(r.data.color(i))] << '\n';
  }
}

fairkm::Algorithm algorithm_of(const std::string& name) {
  const auto a = fairkm::parse_algorithm(name);
  if (!a) throw fairkm::DomainError("unknown algorithm '" + name + "'");
  return *a;
}

fairkm::FairSolveResult run_solver(fairkm::Algorithm a, const Dataset& data, const fairkm::SolverConfig& config,
                                   double epsilon, std::size_t ptas_samples) {
  switch (a) {
    case fairkm::Algorithm::kCklv:
      return fairkm::cklv_kmeanspp(data, config);
    case fairkm::Algorithm::kReassigned:
      return fairkm::reassigned_cklv(data, config);
    case fairkm::Algorithm::kFair:
      return fairkm::fair_kmeanspp(data, config);
    case fairkm::Algorithm::kPtas: {
      fairkm::PtasOptions o;
      o.samples = ptas_samples;
      o.seed = config.seed;
      return fairkm::ptas(data, config.k, epsilon, o);
    }
  }
  throw fairkm::DomainError("unknown algorithm");
}

json coreset_summary(const fairkm::FairCoreset& s, std::size_t input_points) {
  return {{"input_points", input_points},
          {"summary_points", s.summary.size()},
          {"k", s.k},
          {"epsilon", s.epsilon},
          {"movement", s.movement_budget_used},
          {"opt_lower_bound", s.opt_lower_bound},
          {"epsilon_accumulated", s.epsilon_accumulated},
          {"within_contract", s.within_contract}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fair k-means toolkit: fair coresets, fairlets and fair solvers"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::size_t k = 2;
  double epsilon = 0.2;
  std::size_t coreset_size = 0;
  std::string output;
  std::string algo = "fair";
  InputArgs in;

  auto* ingest = app.add_subcommand("ingest", "Read a CSV, report its shape and optionally write the cleaned data");
  add_input_args(ingest, in);
  ingest->add_option("--seed", seed, "Seed for balancing");
  ingest->add_option("--output", output, "Write the cleaned numeric CSV here");

  std::size_t block_size = 0;
  auto* coreset = app.add_subcommand("coreset", "Build a fair coreset and serialize it");
  add_input_args(coreset, in);
  coreset->add_option("--k", k, "Number of centers")->check(CLI::PositiveNumber);
  coreset->add_option("--epsilon", epsilon, "Accuracy")->check(CLI::Range(0.0, 1.0));
  coreset->add_option("--coreset-size", coreset_size, "Maximum summary size (0: no cap)");
  coreset->add_option("--stream", block_size, "Merge and reduce over blocks of this many points");
  coreset->add_option("--seed", seed, "Random seed");
  coreset->add_option("--output", output, "Binary coreset file");

  bool on_coreset = false;
  std::size_t max_iterations = 100;
  std::size_t ptas_samples = 2000;
  auto* cluster = app.add_subcommand("cluster", "Run one fair solver");
  add_input_args(cluster, in);
  cluster->add_option("--algo", algo, "Solver")->check(CLI::IsMember({"cklv", "reassigned", "fair", "ptas"}));
  cluster->add_option("--k", k, "Number of centers")->check(CLI::PositiveNumber);
  cluster->add_option("--epsilon", epsilon, "PTAS and coreset accuracy")->check(CLI::PositiveNumber);
  cluster->add_option("--coreset-size", coreset_size, "Solve on a coreset of this size, evaluate on the input");
  cluster->add_flag("--on-coreset", on_coreset, "Solve on a coreset (size 200 k unless --coreset-size)");
  cluster->add_option("--iterations", max_iterations, "Lloyd iteration cap")->check(CLI::PositiveNumber);
  cluster->add_option("--ptas-samples", ptas_samples, "Candidate sets in sampled PTAS mode");
  cluster->add_option("--seed", seed, "Random seed");
  cluster->add_option("--output", output, "JSON result file (default: stdout)");

  fairkm::ExperimentConfig ec;
  std::vector<std::string> algos{"cklv", "reassigned", "fair"};
  std::vector<std::size_t> ks{2};
  std::size_t synthetic = 0, synthetic_dim = 10, synthetic_components = 5;
  bool coreset_only = false, input_only = false;
  auto* experiment = app.add_subcommand("experiment", "Run the input-versus-coreset grid and write CSV reports");
  add_input_args(experiment, in, false);
  experiment->add_option("--synthetic", synthetic, "Use a synthetic balanced mixture of this size instead");
  experiment->add_option("--dim", synthetic_dim, "Synthetic dimension");
  experiment->add_option("--components", synthetic_components, "Synthetic mixture components");
  experiment->add_option("--sizes", ec.sizes, "Ascending subsample sizes (default: full input)")->delimiter(',');
  experiment->add_option("--k", ks, "Center counts")->delimiter(',');
  experiment->add_option("--algo", algos, "Solvers")->delimiter(',')->check(
      CLI::IsMember({"cklv", "reassigned", "fair", "ptas"}));
  experiment->add_option("--epsilon", ec.epsilon, "Coreset accuracy")->check(CLI::Range(0.0, 1.0));
  experiment->add_option("--coreset-size", ec.coreset_size, "Coreset size target (0: 200 k)");
  experiment->add_option("--reps", ec.repetitions, "Repetitions per cell")->check(CLI::PositiveNumber);
  experiment->add_option("--iterations", ec.max_iterations, "Lloyd iteration cap")->check(CLI::PositiveNumber);
  experiment->add_option("--ptas-samples", ec.ptas_samples, "Candidate sets in sampled PTAS mode");
  experiment->add_option("--workers", ec.workers, "Concurrent cells")->check(CLI::PositiveNumber);
  experiment->add_flag("--coreset-only", coreset_only, "Skip the input pipeline");
  experiment->add_flag("--input-only", input_only, "Skip the coreset pipeline");
  experiment->add_option("--seed", seed, "Random seed");
  experiment->add_option("--output", output, "Report directory")->required();

  std::string coreset_file;
  fairkm::VerifyOptions vo;
  auto* verify = app.add_subcommand("verify", "Check a coreset against every coloring constraint on a tiny input");
  add_input_args(verify, in);
  verify->add_option("--k", k, "Number of centers")->check(CLI::PositiveNumber);
  verify->add_option("--epsilon", epsilon, "Accuracy")->check(CLI::Range(0.0, 1.0));
  verify->add_option("--coreset", coreset_file, "Coreset file to check (default: build one)");
  verify->add_option("--trials", vo.random_trials, "Random center sets");
  verify->add_option("--max-weight", vo.guard.max_total_weight, "Enumeration guard on total weight");
  verify->add_option("--seed", seed, "Random seed");
  verify->add_option("--output", output, "JSON report file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (ingest->parsed()) {
      const auto r = load(in, seed);
      if (!output.empty()) write_dataset_csv(r, output);
      std::cout << ingest_summary(r).dump(2) << '\n';
      return 0;
    }

    if (coreset->parsed()) {
      const auto r = load(in, seed);
      fairkm::CoresetOptions co;
      co.seed = seed;
      co.size_target = coreset_size;
      fairkm::FairCoreset s;
      if (block_size > 0) {
        fairkm::StreamingCoresetBuilder::Options so;
        so.block_size = block_size;
        so.coreset = co;
        fairkm::StreamingCoresetBuilder builder(r.data.dim(), r.data.num_colors(), k, epsilon, so);
        builder.insert_all(r.data);
        s = builder.finish();
      } else {
        s = fairkm::build_fair_coreset(r.data, k, epsilon, co);
      }
      if (!output.empty()) {
        std::ofstream out(output, std::ios::binary);
        if (!out) throw fairkm::DomainError("cannot write '" + output + "'");
        fairkm::write_coreset(out, s);
      }
      std::cout << coreset_summary(s, r.data.size()).dump(2) << '\n';
      return 0;
    }

    if (cluster->parsed()) {
      const auto r = load(in, seed);
      const auto a = algorithm_of(algo);
      fairkm::SolverConfig config;
      config.k = k;
      config.seed = seed;
      config.max_iterations = max_iterations;
      json result{{"algorithm", algo}, {"k", k}, {"seed", seed}, {"points", r.data.size()}};
      fairkm::Centers centers;
      if (on_coreset || coreset_size > 0) {
        fairkm::CoresetOptions co;
        co.seed = seed;
        co.size_target = coreset_size > 0 ? coreset_size : 200 * k;
        const auto s = fairkm::build_fair_coreset(r.data, k, epsilon, co);
        const auto res = run_solver(a, s.summary, config, epsilon, ptas_samples);
        centers = res.clustering.centers;
        result["coreset"] = coreset_summary(s, r.data.size());
        result["iterations"] = res.iterations;
        const auto eval = fairkm::fair_assignment(r.data, centers);
        result["cost"] = eval.cost;
        result["evaluation"] = "fair_assignment";
      } else {
        const auto res = run_solver(a, r.data, config, epsilon, ptas_samples);
        centers = res.clustering.centers;
        result["iterations"] = res.iterations;
        result["cost"] = res.clustering.cost;
        result["evaluation"] = a == fairkm::Algorithm::kCklv ? "fairlet" : "fair_assignment";
      }
      result["fairlet_cost"] = fairkm::compute_fairlets(r.data).matching_cost;
      result["centers"] = centers_json(centers);
      emit_json(result, output);
      return 0;
    }

    if (experiment->parsed()) {
      if (coreset_only && input_only) throw fairkm::DomainError("--coreset-only and --input-only exclude each other");
      Dataset data;
      if (synthetic > 0) {
        data = fairkm::synthetic_mixture(synthetic, synthetic_dim, synthetic_components, seed);
      } else if (!in.path.empty()) {
        data = load(in, seed).data;
      } else {
        throw fairkm::DomainError("give an input CSV or --synthetic");
      }
      ec.ks = ks;
      ec.algorithms.clear();
      for (const auto& name : algos) ec.algorithms.push_back(algorithm_of(name));
      ec.seed = seed;
      ec.run_input = !coreset_only;
      ec.run_coreset = !input_only;
      const auto report = fairkm::run_experiment(data, ec);
      fairkm::emit_report(report, output);
      std::size_t failed = 0;
      for (const auto& run : report.runs) failed += run.status != "ok" && run.status != "skipped";
      std::cout << json{{"runs", report.runs.size()}, {"failed_runs", failed}, {"cells", report.aggregates.size()},
                        {"output", output}}
                       .dump(2)
                << '\n';
      return 0;
    }

    if (verify->parsed()) {
      const auto r = load(in, seed);
      fairkm::FairCoreset s;
      if (!coreset_file.empty()) {
        std::ifstream cf(coreset_file, std::ios::binary);
        if (!cf) throw fairkm::DomainError("cannot read '" + coreset_file + "'");
        s = fairkm::read_coreset(cf);
      } else {
        fairkm::CoresetOptions co;
        co.seed = seed;
        s = fairkm::build_fair_coreset(r.data, k, epsilon, co);
      }
      vo.seed = seed;
      const auto report = fairkm::verify_coreset(r.data, s, epsilon, vo);
      emit_json({{"summary_points", s.summary.size()},
                 {"center_sets", report.center_sets},
                 {"constraints", report.constraints},
                 {"violations", report.violations},
                 {"max_deviation", report.max_deviation},
                 {"passed", report.passed}},
                output);
      return report.passed ? 0 : kExitViolations;
    }
  } catch (const fairkm::GuardError& e) {
    std::cerr << "guard exceeded: " << e.what() << '\n';
    return kExitGuard;
  } catch (const fairkm::BalanceError& e) {
    std::cerr << "balance error: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const fairkm::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const fairkm::DomainError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const fairkm::UnsupportedError& e) {
    std::cerr << "unsupported input: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
