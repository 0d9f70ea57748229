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


#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>

#include "fairkm/core.hpp"
#include "fairkm/coreset.hpp"
#include "fairkm/errors.hpp"
#include "fairkm/experiment.hpp"
#include "fairkm/fairassign.hpp"
#include "fairkm/fairlets.hpp"
#include "fairkm/sketch.hpp"
#include "fairkm/solvers.hpp"

namespace py = pybind11;
using namespace fairkm;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;
using IntArray = py::array_t<std::int64_t, py::array::c_style | py::array::forcecast>;

Dataset make_dataset(const Array& coords, const IntArray& colors, std::optional<IntArray> weights,
                     std::optional<int> num_colors) {
  if (coords.ndim() != 2) throw DomainError("coords must be a 2-d array");
  const auto n = static_cast<std::size_t>(coords.shape(0));
  const auto d = static_cast<std::size_t>(coords.shape(1));
  if (colors.ndim() != 1 || static_cast<std::size_t>(colors.shape(0)) != n) {
    throw DomainError("colors must have one entry per row");
  }
  if (weights && (weights->ndim() != 1 || static_cast<std::size_t>(weights->shape(0)) != n)) {
    throw DomainError("weights must have one entry per row");
  }
  const auto* c = colors.data();
  int l = 0;
  for (std::size_t i = 0; i < n; ++i) l = std::max<int>(l, static_cast<int>(c[i]) + 1);
  Dataset out(d, num_colors.value_or(l));
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.add({coords.data() + i * d, d}, static_cast<Color>(c[i]), weights ? weights->data()[i] : 1);
  }
  return out;
}

Array coords_array(const Dataset& data) {
  Array out({data.size(), data.dim()});
  std::copy(data.coords().begin(), data.coords().end(), out.mutable_data());
  return out;
}

Array centers_array(const Centers& centers) {
  Array out({centers.size(), centers.dim()});
  std::copy(centers.data().begin(), centers.data().end(), out.mutable_data());
  return out;
}

Centers make_centers(const Array& a) {
  if (a.ndim() != 2) throw DomainError("centers must be a 2-d array");
  const auto d = static_cast<std::size_t>(a.shape(1));
  return Centers(d, std::vector<double>(a.data(), a.data() + a.size()));
}

py::array_t<std::int64_t> counts_array(const CountMatrix& m) {
  py::array_t<std::int64_t> out({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

SolverConfig solver_config(std::size_t k, std::uint64_t seed, std::size_t max_iterations) {
  SolverConfig c;
  c.k = k;
  c.seed = seed;
  c.max_iterations = max_iterations;
  return c;
}

py::bytes coreset_bytes(const FairCoreset& s) {
  std::ostringstream out;
  write_coreset(out, s);
  return py::bytes(out.str());
}

FairCoreset coreset_from_bytes(const py::bytes& b) {
  std::istringstream in(static_cast<std::string>(b));
  return read_coreset(in);
}

py::dict run_dict(const RunRecord& r) {
  py::dict d;
  d["algorithm"] = r.algorithm;
  d["pipeline"] = r.pipeline;
  d["n"] = r.n;
  d["k"] = r.k;
  d["repetition"] = r.repetition;
  d["seed"] = r.seed;
  d["status"] = r.status;
  d["message"] = r.message;
  d["cost"] = r.cost;
  d["fairlet_cost"] = r.fairlet_cost;
  d["coreset_points"] = r.coreset_points;
  d["evaluation"] = r.evaluation;
  d["centers"] = centers_array(r.centers);
  d["times"] = py::dict(py::arg("coreset") = r.times.coreset, py::arg("fairlets") = r.times.fairlets,
                        py::arg("solve") = r.times.solve, py::arg("assignment") = r.times.assignment);
  return d;
}

}  // namespace

PYBIND11_MODULE(_fairkm, m) {
  m.doc() = "Fair k-means: fairlets, fair assignment, fair coresets and solvers";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<BalanceError>(m, "BalanceError", PyExc_ValueError);
  py::register_exception<UnsupportedError>(m, "UnsupportedError", PyExc_ValueError);
  py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_RuntimeError);
  py::register_exception<GuardError>(m, "GuardError", PyExc_RuntimeError);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init(&make_dataset), py::arg("coords"), py::arg("colors"), py::arg("weights") = py::none(),
           py::arg("num_colors") = py::none())
      .def("__len__", &Dataset::size)
      .def_property_readonly("dim", &Dataset::dim)
      .def_property_readonly("num_colors", &Dataset::num_colors)
      .def_property_readonly("total_weight", &Dataset::total_weight)
      .def_property_readonly("coords", &coords_array)
      .def_property_readonly("colors", [](const Dataset& d) { return py::array_t<int>(d.size(), d.colors().data()); })
      .def_property_readonly("weights",
                             [](const Dataset& d) { return py::array_t<std::int64_t>(d.size(), d.weights().data()); })
      .def("color_weight", &Dataset::color_weight)
      .def("__eq__", [](const Dataset& a, const Dataset& b) { return a == b; });

  py::class_<FairClustering>(m, "FairClustering")
      .def_property_readonly("centers", [](const FairClustering& c) { return centers_array(c.centers); })
      .def_readonly("cost", &FairClustering::cost)
      .def_property_readonly("color_counts", [](const FairClustering& c) { return counts_array(c.color_counts); })
      .def_property_readonly("assignment", [](const FairClustering& c) {
        py::list out;
        for (const auto& parts : c.assignment) {
          py::list row;
          for (const auto& p : parts) row.append(py::make_tuple(p.center, p.weight));
          out.append(row);
        }
        return out;
      });

  py::class_<FairSolveResult>(m, "SolveResult")
      .def_readonly("clustering", &FairSolveResult::clustering)
      .def_readonly("iterations", &FairSolveResult::iterations)
      .def_readonly("cost_history", &FairSolveResult::cost_history);

  m.def("kmeans_cost", [](const Dataset& d, const Array& c) { return kmeans_cost(d, make_centers(c)); });
  m.def("fair_assignment", [](const Dataset& d, const Array& c) { return fair_assignment(d, make_centers(c)); });
  m.def(
      "is_fair", [](const Dataset& d, const FairClustering& c) { return check_fair(c, d, 1, 1).fair; },
      "Exact balance of every cluster.");
  m.def("fairlet_cost", [](const Dataset& d) { return compute_fairlets(d).matching_cost; });
  m.def("fairlet_representatives", [](const Dataset& d) { return compute_fairlets(d).representatives; });

  m.def(
      "kmeanspp",
      [](const Dataset& d, std::size_t k, std::uint64_t seed, std::size_t max_iterations) {
        const auto r = kmeanspp(d, solver_config(k, seed, max_iterations));
        return py::make_tuple(centers_array(r.centers), r.cost);
      },
      py::arg("data"), py::arg("k"), py::arg("seed") = 0, py::arg("max_iterations") = 100);
  m.def(
      "cklv_kmeanspp",
      [](const Dataset& d, std::size_t k, std::uint64_t seed, std::size_t it) {
        return cklv_kmeanspp(d, solver_config(k, seed, it));
      },
      py::arg("data"), py::arg("k"), py::arg("seed") = 0, py::arg("max_iterations") = 100);
  m.def(
      "reassigned_cklv",
      [](const Dataset& d, std::size_t k, std::uint64_t seed, std::size_t it) {
        return reassigned_cklv(d, solver_config(k, seed, it));
      },
      py::arg("data"), py::arg("k"), py::arg("seed") = 0, py::arg("max_iterations") = 100);
  m.def(
      "fair_kmeanspp",
      [](const Dataset& d, std::size_t k, std::uint64_t seed, std::size_t it) {
        return fair_kmeanspp(d, solver_config(k, seed, it));
      },
      py::arg("data"), py::arg("k"), py::arg("seed") = 0, py::arg("max_iterations") = 100);
  m.def(
      "ptas",
      [](const Dataset& d, std::size_t k, double eps, std::uint64_t seed, std::size_t samples, bool polish) {
        PtasOptions o;
        o.seed = seed;
        o.samples = samples;
        o.polish = polish;
        return ptas(d, k, eps, o);
      },
      py::arg("data"), py::arg("k"), py::arg("epsilon") = 1.0, py::arg("seed") = 0, py::arg("samples") = 2000,
      py::arg("polish") = true);
  m.def(
      "brute_force_opt", [](const Dataset& d, std::size_t k) { return brute_force_opt(d, k); }, py::arg("data"),
      py::arg("k"));

  py::class_<FairCoreset>(m, "FairCoreset")
      .def_readonly("summary", &FairCoreset::summary)
      .def_readonly("k", &FairCoreset::k)
      .def_readonly("epsilon", &FairCoreset::epsilon)
      .def_readonly("movement", &FairCoreset::movement_budget_used)
      .def_readonly("opt_lower_bound", &FairCoreset::opt_lower_bound)
      .def_readonly("epsilon_accumulated", &FairCoreset::epsilon_accumulated)
      .def_readonly("within_contract", &FairCoreset::within_contract)
      .def("to_bytes", &coreset_bytes)
      .def_static("from_bytes", &coreset_from_bytes)
      .def("__eq__", [](const FairCoreset& a, const FairCoreset& b) { return a == b; });

  m.def(
      "build_fair_coreset",
      [](const Dataset& d, std::size_t k, double eps, std::uint64_t seed, std::size_t size_target) {
        CoresetOptions o;
        o.seed = seed;
        o.size_target = size_target;
        return build_fair_coreset(d, k, eps, o);
      },
      py::arg("data"), py::arg("k"), py::arg("epsilon"), py::arg("seed") = 0, py::arg("size_target") = 0);
  m.def("merge", &merge);
  m.def(
      "recompress",
      [](const FairCoreset& s, std::size_t k, double eps, std::uint64_t seed) {
        CoresetOptions o;
        o.seed = seed;
        return recompress(s, k, eps, o);
      },
      py::arg("coreset"), py::arg("k"), py::arg("epsilon"), py::arg("seed") = 0);
  m.def(
      "verify_coreset",
      [](const Dataset& d, const FairCoreset& s, double eps, std::size_t trials, std::uint64_t seed) {
        VerifyOptions o;
        o.random_trials = trials;
        o.seed = seed;
        const auto r = verify_coreset(d, s, eps, o);
        return py::dict(py::arg("center_sets") = r.center_sets, py::arg("constraints") = r.constraints,
                        py::arg("violations") = r.violations, py::arg("max_deviation") = r.max_deviation,
                        py::arg("passed") = r.passed);
      },
      py::arg("data"), py::arg("coreset"), py::arg("epsilon"), py::arg("trials") = 10, py::arg("seed") = 0);

  py::class_<StreamingCoresetBuilder>(m, "StreamingCoresetBuilder")
      .def(py::init([](std::size_t d, int l, std::size_t k, double eps, std::size_t block, std::size_t target,
                       std::uint64_t seed) {
             StreamingCoresetBuilder::Options o;
             o.block_size = block;
             o.coreset.size_target = target;
             o.coreset.seed = seed;
             return StreamingCoresetBuilder(d, l, k, eps, o);
           }),
           py::arg("dim"), py::arg("num_colors"), py::arg("k"), py::arg("epsilon"), py::arg("block_size") = 8192,
           py::arg("size_target") = 0, py::arg("seed") = 0)
      .def("insert_all", &StreamingCoresetBuilder::insert_all)
      .def_property_readonly("points_seen", &StreamingCoresetBuilder::points_seen)
      .def("finish", &StreamingCoresetBuilder::finish);

  py::class_<SketchState>(m, "SketchState")
      .def(py::init([](std::size_t d, int l, std::size_t k, double eps, std::size_t sketch_dim, std::uint64_t seed) {
             return SketchState(d, l, k, eps, sketch_dim == 0 ? default_sketch_dimension(k, eps) : sketch_dim, seed);
           }),
           py::arg("dim"), py::arg("num_colors"), py::arg("k"), py::arg("epsilon"), py::arg("sketch_dim") = 0,
           py::arg("seed") = 0)
      .def("insert_all", &SketchState::insert_all)
      .def_property_readonly("rows_seen", &SketchState::rows_seen)
      .def("summary", &SketchState::summary);
  m.def("recover_centers",
        [](const FairCoreset& s, const FairClustering& c) { return centers_array(recover_centers(s, c)); });

  m.def("synthetic_mixture", &synthetic_mixture, py::arg("n"), py::arg("dim"), py::arg("components"),
        py::arg("seed") = 0, py::arg("spread") = 10.0);
  m.def(
      "ingest_csv",
      [](const std::string& path, const std::string& color_column, bool balance, bool zscore, std::uint64_t seed) {
        IngestOptions o;
        o.color_column = color_column;
        o.balance = balance;
        o.zscore = zscore;
        o.seed = seed;
        auto r = ingest_csv(path, o);
        py::dict info(py::arg("rows_read") = r.rows_read, py::arg("rows_dropped_missing") = r.rows_missing,
                      py::arg("rows_removed_balance") = r.rows_balanced, py::arg("features") = r.feature_names,
                      py::arg("color_labels") = r.color_labels, py::arg("dropped_columns") = r.dropped_columns);
        return py::make_tuple(std::move(r.data), info);
      },
      py::arg("path"), py::arg("color_column"), py::arg("balance") = false, py::arg("zscore") = false,
      py::arg("seed") = 0);
  m.def(
      "run_experiment",
      [](const Dataset& d, std::vector<std::size_t> sizes, std::vector<std::size_t> ks,
         std::vector<std::string> algorithms, double eps, std::size_t coreset_size, std::size_t reps,
         std::uint64_t seed, std::string output) {
        ExperimentConfig c;
        c.sizes = std::move(sizes);
        c.ks = std::move(ks);
        c.algorithms.clear();
        for (const auto& a : algorithms) {
          const auto parsed = parse_algorithm(a);
          if (!parsed) throw DomainError("unknown algorithm '" + a + "'");
          c.algorithms.push_back(*parsed);
        }
        c.epsilon = eps;
        c.coreset_size = coreset_size;
        c.repetitions = reps;
        c.seed = seed;
        ExperimentReport report;
        {
          py::gil_scoped_release release;
          report = run_experiment(d, c);
          if (!output.empty()) emit_report(report, output);
        }
        py::list runs;
        for (const auto& r : report.runs) runs.append(run_dict(r));
        return runs;
      },
      py::arg("data"), py::arg("sizes") = std::vector<std::size_t>{}, py::arg("ks") = std::vector<std::size_t>{2},
      py::arg("algorithms") = std::vector<std::string>{"cklv", "reassigned", "fair"}, py::arg("epsilon") = 0.2,
      py::arg("coreset_size") = 0, py::arg("reps") = 5, py::arg("seed") = 0, py::arg("output") = "");
}
