#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "treelab/cli.hpp"
#include "treelab/covering.hpp"
#include "treelab/entropy.hpp"
#include "treelab/error.hpp"
#include "treelab/glauber.hpp"
#include "treelab/graph.hpp"
#include "treelab/kernel.hpp"
#include "treelab/local_stats.hpp"
#include "treelab/parallel.hpp"
#include "treelab/rng.hpp"
#include "treelab/tree.hpp"

namespace py = pybind11;
using namespace treelab;

namespace {

// Big integers cross the boundary as Python ints via their decimal form.
py::int_ to_py(const BigInt& x) {
  return py::reinterpret_steal<py::int_>(PyLong_FromString(x.str().c_str(), nullptr, 10));
}

GlauberRun make_run(int d, int depth, int sweeps, std::size_t replicas, std::uint64_t seed, int workers,
                    int window) {
  GlauberRun run;
  run.d = d;
  run.depth = depth;
  run.sweeps = sweeps;
  run.replicas = replicas;
  run.seed = seed;
  run.workers = workers;
  run.window_depth = window;
  return run;
}

}  // namespace

PYBIND11_MODULE(_treelab, m) {
  m.doc() = "Branching Markov chains on regular trees, Glauber dynamics and covering thresholds";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<BudgetError>(m, "BudgetError", PyExc_RuntimeError);
  py::register_exception<IncompatibleConfiguration>(m, "IncompatibleConfiguration", PyExc_ValueError);

  py::class_<TransitionKernel>(m, "TransitionKernel")
      .def(py::init<std::vector<std::vector<double>>, std::vector<double>, std::string>(), py::arg("rows"),
           py::arg("pi"), py::arg("label") = "")
      .def_static("from_rows", &TransitionKernel::from_rows, py::arg("rows"), py::arg("label") = "")
      .def_property_readonly("states", &TransitionKernel::states)
      .def_property_readonly("pi", &TransitionKernel::pi)
      .def_property_readonly("label", &TransitionKernel::label)
      .def("rows", &TransitionKernel::rows)
      .def("__repr__", [](const TransitionKernel& k) { return "<TransitionKernel " + k.label() + ">"; });

  m.def("ising", &make_ising, py::arg("theta"));
  m.def("potts", &make_potts, py::arg("k"), py::arg("p"));
  m.def("uniform", &make_uniform, py::arg("k"));
  m.def("walk", &make_walk_kernel, py::arg("graph"));
  m.def("dobrushin_coefficient", &dobrushin_coefficient, py::arg("kernel"), py::arg("d"),
        py::arg("budget") = 1e8);
  m.def("spectral_radius", &spectral_radius, py::arg("kernel"));

  py::class_<RegularGraph>(m, "RegularGraph")
      .def_static("from_edges",
                  [](int n, int d, const std::vector<std::pair<int, int>>& e) {
                    return RegularGraph::from_edges(n, d, e);
                  },
                  py::arg("n"), py::arg("d"), py::arg("edges"))
      .def_property_readonly("n", &RegularGraph::size)
      .def_property_readonly("d", &RegularGraph::degree)
      .def_property_readonly("simple", &RegularGraph::simple)
      .def("edges", &RegularGraph::edges)
      .def("multiplicity", &RegularGraph::multiplicity)
      .def("connected", &RegularGraph::connected);

  m.def("sample_regular_graph",
        [](int n, int d, bool simple, std::uint64_t seed, int retries) {
          Stream rng(seed);
          return sample_regular_graph(n, d, simple, rng, retries);
        },
        py::arg("n"), py::arg("d"), py::arg("simple") = true, py::arg("seed") = 1, py::arg("retries") = 10'000);
  m.def("pm_count", [](int n) { return to_py(pm_count(n)); }, py::arg("m"));
  m.def("paired_coloring_count",
        [](const std::vector<std::vector<double>>& nu, int n) { return to_py(paired_coloring_count(nu, n)); },
        py::arg("nu"), py::arg("n"));
  m.def("matching_color_count",
        [](const std::vector<int>& colors, const std::vector<std::vector<double>>& nu) {
          return to_py(matching_color_count(colors, nu));
        },
        py::arg("colors"), py::arg("nu"));
  m.def("vertex_coloring_count",
        [](const std::vector<int>& counts) { return to_py(vertex_coloring_count(counts)); },
        py::arg("color_counts"));
  m.def("girth_profile", &girth_profile, py::arg("graph"), py::arg("L"));

  py::class_<EntropyReport>(m, "EntropyReport")
      .def_readonly("d", &EntropyReport::d)
      .def_readonly("h_vertex", &EntropyReport::h_vertex)
      .def_readonly("h_edge", &EntropyReport::h_edge)
      .def_readonly("h_star", &EntropyReport::h_star)
      .def_readonly("slack_edge_vertex", &EntropyReport::slack_edge_vertex)
      .def_readonly("slack_star_edge", &EntropyReport::slack_star_edge);
  py::class_<Verdict>(m, "Verdict").def_readonly("passes", &Verdict::passes).def_readonly("slack", &Verdict::slack);
  m.def("entropy_report", &bmc_entropy_report, py::arg("kernel"), py::arg("d"));
  m.def("check_edge_vertex", &check_edge_vertex, py::arg("report"), py::arg("d"));
  m.def("check_star_edge", &check_star_edge, py::arg("report"), py::arg("d"));
  py::class_<CounterexampleCertificate>(m, "CounterexampleCertificate")
      .def_readonly("nontypical", &CounterexampleCertificate::nontypical)
      .def_readonly("lhs", &CounterexampleCertificate::lhs)
      .def_readonly("rhs", &CounterexampleCertificate::rhs)
      .def_readonly("threshold", &CounterexampleCertificate::threshold)
      .def_readonly("ramanujan_target", &CounterexampleCertificate::ramanujan_target);
  m.def("expander_counterexample", &expander_counterexample, py::arg("k"), py::arg("q_deg"), py::arg("d") = 3);

  m.def("exact_correlation",
        [](const TransitionKernel& q, int k, const std::vector<double>& f) { return exact_correlation(q, k, f); },
        py::arg("kernel"), py::arg("k"), py::arg("encoding"));
  m.def("cordec_bound", &cordec_bound, py::arg("k"), py::arg("d"));
  py::class_<CordecVerdict>(m, "CordecVerdict")
      .def_readonly("violates", &CordecVerdict::violates)
      .def_readonly("witness", &CordecVerdict::witness)
      .def_readonly("correlation", &CordecVerdict::correlation)
      .def_readonly("bound", &CordecVerdict::bound)
      .def_readonly("k_max", &CordecVerdict::k_max);
  m.def("classify_cordec",
        [](const TransitionKernel& q, int d, const std::vector<double>& f, int k_max) {
          return classify_cordec(q, d, f, k_max);
        },
        py::arg("kernel"), py::arg("d"), py::arg("encoding"), py::arg("k_max") = 200);
  py::class_<CorrelationEstimate>(m, "CorrelationEstimate")
      .def_readonly("value", &CorrelationEstimate::value)
      .def_readonly("std_error", &CorrelationEstimate::std_error)
      .def_readonly("replicas", &CorrelationEstimate::replicas)
      .def_readonly("seed", &CorrelationEstimate::seed);
  m.def("estimate_correlation",
        [](const TransitionKernel& q, int distance, const std::vector<double>& f, std::size_t replicas,
           std::uint64_t seed, int workers) {
          py::gil_scoped_release release;
          return estimate_correlation(q, distance, f, replicas, seed, workers);
        },
        py::arg("kernel"), py::arg("distance"), py::arg("encoding"), py::arg("replicas"), py::arg("seed"),
        py::arg("workers") = 1);

  py::class_<RateFit>(m, "RateFit")
      .def_readonly("rate", &RateFit::rate)
      .def_readonly("rate_low", &RateFit::rate_low)
      .def_readonly("rate_high", &RateFit::rate_high)
      .def_readonly("points", &RateFit::points);
  py::class_<DecayCurve>(m, "DecayCurve")
      .def_readonly("mean", &DecayCurve::mean)
      .def_readonly("std_error", &DecayCurve::std_error)
      .def_readonly("fit", &DecayCurve::fit)
      .def_readonly("dobrushin", &DecayCurve::dobrushin)
      .def_readonly("wake_probability", &DecayCurve::wake_probability)
      .def_readonly("contraction_factor", &DecayCurve::contraction_factor);
  m.def("glauber_contraction",
        [](const TransitionKernel& q, int d, int depth, int sweeps, std::size_t replicas, std::uint64_t seed,
           int workers, int window) {
          py::gil_scoped_release release;
          return estimate_hamming_decay(q, make_run(d, depth, sweeps, replicas, seed, workers, window));
        },
        py::arg("kernel"), py::arg("d") = 3, py::arg("depth") = 8, py::arg("sweeps") = 50,
        py::arg("replicas") = 1000, py::arg("seed") = 1, py::arg("workers") = 1, py::arg("window") = -1);
  py::class_<PatternCheck>(m, "PatternCheck")
      .def_property_readonly("pattern",
                             [](const PatternCheck& c) {
                               return c.pattern == Pattern::vertex ? "vertex"
                                      : c.pattern == Pattern::edge ? "edge"
                                                                   : "star";
                             })
      .def_readonly("exact", &PatternCheck::exact)
      .def_readonly("empirical", &PatternCheck::empirical)
      .def_readonly("std_error", &PatternCheck::std_error)
      .def_readonly("tv", &PatternCheck::tv)
      .def_readonly("noise_floor", &PatternCheck::noise_floor)
      .def_readonly("max_z", &PatternCheck::max_z);
  m.def("glauber_fixed_point",
        [](const TransitionKernel& q, int d, int depth, int sweeps, std::size_t replicas, std::uint64_t seed,
           int workers, int window) {
          py::gil_scoped_release release;
          return fixed_point_test(q, make_run(d, depth, sweeps, replicas, seed, workers, window)).checks;
        },
        py::arg("kernel"), py::arg("d") = 3, py::arg("depth") = 8, py::arg("sweeps") = 50,
        py::arg("replicas") = 1000, py::arg("seed") = 1, py::arg("workers") = 1, py::arg("window") = -1);

  py::enum_<DeltaFamily>(m, "DeltaFamily")
      .value("generic", DeltaFamily::generic)
      .value("dominating", DeltaFamily::dominating)
      .value("bipartite", DeltaFamily::bipartite);
  py::class_<CoveringMatrix>(m, "CoveringMatrix")
      .def(py::init<int, std::vector<std::vector<int>>>(), py::arg("d"), py::arg("entries"))
      .def_static("dominating", &CoveringMatrix::dominating, py::arg("d"))
      .def_static("bipartite", &CoveringMatrix::bipartite, py::arg("d"))
      .def_property_readonly("states", &CoveringMatrix::states)
      .def_property_readonly("d", &CoveringMatrix::degree)
      .def("__call__", &CoveringMatrix::operator(), py::arg("s"), py::arg("t"))
      .def("diameter", &CoveringMatrix::diameter);
  py::class_<CoveringResult>(m, "CoveringResult")
      .def_readonly("ratio", &CoveringResult::ratio)
      .def_readonly("errors", &CoveringResult::errors)
      .def_readonly("coloring", &CoveringResult::coloring)
      .def_readonly("exact", &CoveringResult::exact);
  m.def("error_ratio",
        [](const RegularGraph& g, const std::vector<int>& f, const CoveringMatrix& mat) {
          return error_ratio(g, f, mat);
        },
        py::arg("graph"), py::arg("coloring"), py::arg("matrix"));
  m.def("min_error_exact", &min_error_exact, py::arg("graph"), py::arg("matrix"), py::arg("budget") = 1e8);
  m.def("min_error_local_search",
        [](const RegularGraph& g, const CoveringMatrix& mat, int restarts, std::uint64_t seed) {
          Stream rng(seed);
          return min_error_local_search(g, mat, restarts, rng);
        },
        py::arg("graph"), py::arg("matrix"), py::arg("restarts") = 20, py::arg("seed") = 1);
  m.def("delta_lower_bound", py::overload_cast<const CoveringMatrix&, double>(&delta_lower_bound),
        py::arg("matrix"), py::arg("eps"));

  py::class_<ThresholdReport>(m, "ThresholdReport")
      .def_readonly("epsilon0", &ThresholdReport::epsilon0)
      .def_readonly("delta_id", &ThresholdReport::delta_id)
      .def_readonly("d", &ThresholdReport::d)
      .def_readonly("bracket_low", &ThresholdReport::bracket_low)
      .def_readonly("bracket_high", &ThresholdReport::bracket_high)
      .def_readonly("g_low", &ThresholdReport::g_low)
      .def_readonly("g_high", &ThresholdReport::g_high)
      .def_readonly("scan_eps", &ThresholdReport::scan_eps)
      .def_readonly("scan_g", &ThresholdReport::scan_g);
  m.def("epsilon0", [](DeltaFamily f, int d) { return epsilon0(f, d); }, py::arg("family"), py::arg("d"));
  m.def("epsilon0_matrix", [](const CoveringMatrix& mat) { return epsilon0(mat); }, py::arg("matrix"));
  m.def("epsilon0_custom",
        [](const std::function<double(double)>& delta, int d, int s_count) {
          return epsilon0(delta, d, s_count, "custom");
        },
        py::arg("delta"), py::arg("d"), py::arg("s_count"));
  py::class_<DominatingRow>(m, "DominatingRow")
      .def_readonly("d", &DominatingRow::d)
      .def_readonly("epsilon0", &DominatingRow::epsilon0)
      .def_readonly("dominating_lower", &DominatingRow::dominating_lower);
  m.def("dominating_table", &dominating_table, py::arg("d_from") = 3, py::arg("d_to") = 10);
  m.def("independence_threshold", &independence_threshold, py::arg("d"));

  py::class_<DcnEstimate>(m, "DcnEstimate")
      .def_readonly("value", &DcnEstimate::value)
      .def_readonly("tail_bound", &DcnEstimate::tail_bound)
      .def_readonly("exact", &DcnEstimate::exact)
      .def_readonly("colorings_used", &DcnEstimate::colorings_used);
  m.def("dcn_estimate", &dcn_estimate, py::arg("g1"), py::arg("g2"), py::arg("r_max"), py::arg("k_max"),
        py::arg("coloring_budget") = 1e5, py::arg("samples") = 256, py::arg("seed") = 1);
  m.def("local_tv",
        [](const RegularGraph& g1, const RegularGraph& g2, const std::vector<int>& f, int r) {
          return tv_distance(ball_distribution(g1, f, r), ball_distribution(g2, f, r));
        },
        py::arg("g1"), py::arg("g2"), py::arg("coloring"), py::arg("r"));

  m.def("default_workers", &default_workers);
  m.def("run_cli",
        [](const std::vector<std::string>& args) {
          std::ostringstream out, err;
          const int code = cli::run(args, out, err);
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Run a command-line invocation in process; returns (exit_code, stdout, stderr).");
}
