#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <span>
#include <vector>

#include "sgp/acceptance.hpp"
#include "sgp/config.hpp"
#include "sgp/graph.hpp"
#include "sgp/harness.hpp"
#include "sgp/mixing.hpp"
#include "sgp/objectives.hpp"
#include "sgp/optimizer.hpp"
#include "sgp/pushsum.hpp"
#include "sgp/schedule.hpp"

namespace py = pybind11;
using namespace sgp;

namespace {

std::vector<std::vector<double>> matrix_rows(const Matrix& m) {
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(m.rows()));
  for (int i = 0; i < m.rows(); ++i) {
    rows[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(m.cols()));
    for (int j = 0; j < m.cols(); ++j) rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m.at(i, j);
  }
  return rows;
}

RunMode mode_from_name(const std::string& name) {
  if (name == "graphcheck") return RunMode::GraphCheck;
  if (name == "pushsum") return RunMode::PushSum;
  if (name == "optimize") return RunMode::Optimize;
  if (name == "bounds") return RunMode::Bounds;
  throw std::invalid_argument("unknown run mode \"" + name + "\"");
}

}  // namespace

PYBIND11_MODULE(sgpsim, m) {
  m.doc() = "Subgradient-push simulator over time-varying directed graphs";

  py::class_<Digraph>(m, "Digraph")
      .def(py::init<int>(), py::arg("n"))
      .def_static("complete", &Digraph::complete, py::arg("n"))
      .def_static("ring", &Digraph::ring, py::arg("n"))
      .def_static("circulant", &Digraph::circulant, py::arg("n"), py::arg("hops"))
      .def("add_edge", &Digraph::add_edge, py::arg("from_node"), py::arg("to_node"))
      .def("has_edge", &Digraph::has_edge)
      .def("out_degree", &Digraph::out_degree)
      .def("in_degree", &Digraph::in_degree)
      .def("out_neighbors", &Digraph::out_neighbors)
      .def("in_neighbors", &Digraph::in_neighbors)
      .def("strongly_connected", &Digraph::strongly_connected)
      .def("regular", &Digraph::regular)
      .def_property_readonly("n", &Digraph::node_count)
      .def("__eq__", [](const Digraph& a, const Digraph& b) { return a == b; });

  py::class_<GraphSequence>(m, "GraphSequence")
      .def_static("static_graph", &GraphSequence::static_graph, py::arg("graph"),
                  py::arg("claimed_window") = 1)
      .def_static("cyclic_schedule", &GraphSequence::cyclic_schedule, py::arg("period"),
                  py::arg("claimed_window"))
      .def_static("random_b_connected", &GraphSequence::random_b_connected, py::arg("n"),
                  py::arg("window"), py::arg("seed"), py::arg("extra_edge_prob") = 0.1)
      .def_static("regular_family", &GraphSequence::regular_family, py::arg("n"),
                  py::arg("degrees_cycle"))
      .def("graph_at", &GraphSequence::graph_at, py::arg("t"))
      .def_property_readonly("n", &GraphSequence::node_count)
      .def_property_readonly("claimed_window", &GraphSequence::claimed_window);

  m.def(
      "verify_b_connected",
      [](const GraphSequence& seq, int window, long k_max) {
        const ConnectivityCheck c = verify_b_connected(seq, window, k_max);
        return py::make_tuple(c.all_connected, c.first_failing_window, c.window_ok);
      },
      py::arg("seq"), py::arg("window"), py::arg("k_max"),
      "Returns (all_connected, first_failing_window, per_window_verdicts)");

  py::class_<MixingMatrix>(m, "MixingMatrix")
      .def_property_readonly("n", &MixingMatrix::size)
      .def("at", &MixingMatrix::at)
      .def("rows", [](const MixingMatrix& a) { return matrix_rows(a.entries()); })
      .def("max_column_sum_drift", &MixingMatrix::max_column_sum_drift)
      .def("doubly_stochastic", &MixingMatrix::doubly_stochastic, py::arg("tol") = 1e-12);
  m.def("build_mixing", &build_mixing, py::arg("graph"));

  py::class_<ConnectivityParams>(m, "ConnectivityParams")
      .def_readonly("delta", &ConnectivityParams::delta)
      .def_readonly("lam", &ConnectivityParams::lambda)
      .def_readonly("C", &ConnectivityParams::C);

  m.def("measure_delta", &measure_delta, py::arg("seq"), py::arg("horizon"));
  m.def("theoretical_params", &theoretical_params, py::arg("n"), py::arg("window"),
        py::arg("regular"), py::arg("sigma2_max") = std::nullopt);
  m.def("estimate_lambda", &estimate_lambda, py::arg("seq"), py::arg("start"), py::arg("horizon"));
  m.def("sigma2", &sigma2, py::arg("mixing"));

  py::class_<Optimum>(m, "Optimum")
      .def_readonly("representative", &Optimum::representative)
      .def_readonly("value", &Optimum::value)
      .def_readonly("lower", &Optimum::lower)
      .def_readonly("upper", &Optimum::upper)
      .def("distance", [](const Optimum& o, const std::vector<double>& z) {
        return o.distance(std::span<const double>(z.data(), z.size()));
      });

  py::class_<ObjectiveSpec>(m, "ObjectiveSpec")
      .def_static("abs_deviation", &ObjectiveSpec::abs_deviation, py::arg("anchors"))
      .def_static("l1_distance", &ObjectiveSpec::l1_distance, py::arg("anchors"))
      .def_static("huber", &ObjectiveSpec::huber, py::arg("anchors"), py::arg("kappa"))
      .def_static("linear_clipped", &ObjectiveSpec::linear_clipped, py::arg("anchors"),
                  py::arg("slopes"))
      .def_static("zero", &ObjectiveSpec::zero, py::arg("n"), py::arg("d"))
      .def_property_readonly("n", &ObjectiveSpec::node_count)
      .def_property_readonly("d", &ObjectiveSpec::dimension)
      .def("local_value",
           [](const ObjectiveSpec& s, int i, const std::vector<double>& z) {
             return s.local_value(i, std::span<const double>(z.data(), z.size()));
           })
      .def("subgradient",
           [](const ObjectiveSpec& s, int i, const std::vector<double>& z) {
             std::vector<double> g(static_cast<std::size_t>(s.dimension()));
             s.subgradient(i, std::span<const double>(z.data(), z.size()), g);
             return g;
           })
      .def("subgradient_bound", &ObjectiveSpec::subgradient_bound)
      .def("evaluate_total",
           [](const ObjectiveSpec& s, const std::vector<double>& z) {
             return s.evaluate_total(std::span<const double>(z.data(), z.size()));
           })
      .def("optimum", &ObjectiveSpec::optimum);
  m.def("grid_search_optimum", &grid_search_optimum, py::arg("spec"),
        py::arg("points_per_dim") = 100);

  py::class_<StepSchedule>(m, "StepSchedule")
      .def_static("inv_sqrt", &StepSchedule::inv_sqrt, py::arg("offset") = 0)
      .def_static("inv_t_power", &StepSchedule::inv_t_power, py::arg("power"),
                  py::arg("offset") = 0)
      .def_static("custom_summable_square", &StepSchedule::custom_summable_square,
                  py::arg("scale"), py::arg("power"), py::arg("offset") = 0)
      .def("alpha", &StepSchedule::alpha, py::arg("t"));

  py::class_<PerturbationSource>(m, "PerturbationSource");
  py::class_<ZeroPerturbation, PerturbationSource>(m, "ZeroPerturbation").def(py::init<>());
  py::class_<DecayingPerturbation, PerturbationSource>(m, "DecayingPerturbation")
      .def(py::init<double>(), py::arg("scale"));
  py::class_<CustomSequencePerturbation, PerturbationSource>(m, "CustomSequencePerturbation")
      .def(py::init<int, int, std::vector<std::vector<double>>>(), py::arg("n"), py::arg("d"),
           py::arg("values"));

  py::class_<PushSumTrace>(m, "PushSumTrace")
      .def_readonly("n", &PushSumTrace::n)
      .def_readonly("d", &PushSumTrace::d)
      .def_readonly("rounds", &PushSumTrace::rounds)
      .def_readonly("x", &PushSumTrace::x)
      .def_readonly("y", &PushSumTrace::y)
      .def_readonly("z", &PushSumTrace::z)
      .def_readonly("eps", &PushSumTrace::eps)
      .def_readonly("xbar", &PushSumTrace::xbar)
      .def("tracking_error", &PushSumTrace::tracking_error, py::arg("r"), py::arg("node"))
      .def("max_tracking_error", &PushSumTrace::max_tracking_error, py::arg("r"))
      .def("min_weight", &PushSumTrace::min_weight);

  m.def(
      "run_pushsum",
      [](const GraphSequence& seq, const std::vector<double>& x0, int d,
         const PerturbationSource& eps, long rounds) {
        return run_pushsum(seq, std::span<const double>(x0.data(), x0.size()), d, eps, rounds);
      },
      py::arg("seq"), py::arg("x0"), py::arg("d"), py::arg("eps"), py::arg("rounds"));
  m.def("lemma1_bound", &lemma1_bound, py::arg("trace"), py::arg("params"), py::arg("t"));
  m.def("corollary2_bound", &corollary2_bound, py::arg("trace"), py::arg("params"),
        py::arg("perturbation_scale"), py::arg("t"));
  m.def("weighted_tracking_error", &weighted_tracking_error, py::arg("trace"), py::arg("node"),
        py::arg("t"));

  py::class_<SgpTrace>(m, "SgpTrace")
      .def_readonly("n", &SgpTrace::n)
      .def_readonly("d", &SgpTrace::d)
      .def_readonly("rounds", &SgpTrace::rounds)
      .def_readonly("x", &SgpTrace::x)
      .def_readonly("y", &SgpTrace::y)
      .def_readonly("z", &SgpTrace::z)
      .def_readonly("ztilde", &SgpTrace::ztilde)
      .def_readonly("xbar", &SgpTrace::xbar)
      .def("consensus_radius", &SgpTrace::consensus_radius, py::arg("r"));

  m.def(
      "run_sgp",
      [](const GraphSequence& seq, const ObjectiveSpec& spec, const StepSchedule& sched,
         const std::vector<double>& x0, long rounds) {
        return run_sgp(seq, spec, sched, std::span<const double>(x0.data(), x0.size()), rounds);
      },
      py::arg("seq"), py::arg("spec"), py::arg("sched"), py::arg("x0"), py::arg("rounds"));
  m.def(
      "lemma_key_residual",
      [](const SgpTrace& trace, const ObjectiveSpec& spec, const std::vector<double>& v, long t) {
        return lemma_key_residual(trace, spec, std::span<const double>(v.data(), v.size()), t);
      },
      py::arg("trace"), py::arg("spec"), py::arg("v"), py::arg("t"));
  m.def(
      "theorem2_bound",
      [](const ObjectiveSpec& spec, const ConnectivityParams& params,
         const std::vector<double>& x0, const std::vector<double>& z_star, long t,
         const StepSchedule& sched) {
        return theorem2_bound(spec, params, std::span<const double>(x0.data(), x0.size()),
                              std::span<const double>(z_star.data(), z_star.size()), t, sched);
      },
      py::arg("spec"), py::arg("params"), py::arg("x0"), py::arg("z_star"), py::arg("t"),
      py::arg("sched"));
  m.def(
      "lemma9_bound",
      [](const ObjectiveSpec& spec, const ConnectivityParams& params,
         const std::vector<double>& x0, const std::vector<double>& z_star, long t,
         const StepSchedule& sched) {
        return lemma9_bound(spec, params, std::span<const double>(x0.data(), x0.size()),
                            std::span<const double>(z_star.data(), z_star.size()), t, sched);
      },
      py::arg("spec"), py::arg("params"), py::arg("x0"), py::arg("z_star"), py::arg("t"),
      py::arg("sched"));

  py::class_<RunConfig>(m, "RunConfig");
  m.def("load_config", &load_config, py::arg("path"));
  m.def("parse_config_text", &parse_config_text, py::arg("text"));
  m.def(
      "run_experiment",
      [](const RunConfig& cfg, const std::string& mode, std::optional<std::string> out_dir) {
        const RunOutcome outcome = run_experiment(cfg, mode_from_name(mode), out_dir);
        return py::make_tuple(outcome.exit_code, outcome.summary_json, outcome.stdout_lines);
      },
      py::arg("cfg"), py::arg("mode"), py::arg("out_dir") = std::nullopt,
      "Returns (exit_code, summary_json, stdout_lines)");

  m.def("run_acceptance_suite", [](std::uint64_t seed) {
    const AcceptanceReport report = run_acceptance_suite(seed);
    py::list entries;
    for (const auto& c : report.criteria)
      entries.append(py::make_tuple(c.id, c.name, c.passed, c.detail));
    return py::make_tuple(report.all_passed(), entries);
  }, py::arg("seed") = kAcceptanceSeed);
}
