#include "treelab/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <regex>
#include <sstream>

#include "treelab/covering.hpp"
#include "treelab/entropy.hpp"
#include "treelab/error.hpp"
#include "treelab/glauber.hpp"
#include "treelab/graph.hpp"
#include "treelab/kernel.hpp"
#include "treelab/local_stats.hpp"
#include "treelab/parallel.hpp"
#include "treelab/tree.hpp"

namespace treelab::cli {

namespace {

using json = nlohmann::ordered_json;

// Kernel grammar:
//   ising(theta) | potts(k,p) | uniform(k) | walk(graph-file) | <kernel-file>
struct KernelSpec {
  std::string kind;  // ising, potts, uniform, walk, file
  std::vector<double> params;
  TransitionKernel kernel;
};

double parse_number(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ValidationError("cannot parse " + what + ": '" + s + "'");
  }
  require(used == s.size(), "cannot parse " + what + ": '" + s + "'");
  return v;
}

int parse_int(const std::string& s, const std::string& what) {
  const double v = parse_number(s, what);
  require(v == std::floor(v) && std::abs(v) < 1e9, what + " must be an integer");
  return static_cast<int>(v);
}

KernelSpec parse_kernel(const std::string& text) {
  static const std::regex call(R"(^\s*([a-z]+)\s*\((.*)\)\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, call)) return {"file", {}, load_kernel(text)};
  const std::string name = m[1];
  std::vector<std::string> args;
  {
    std::stringstream ss(m[2].str());
    std::string a;
    while (std::getline(ss, a, ',')) {
      a.erase(0, a.find_first_not_of(" \t"));
      a.erase(a.find_last_not_of(" \t") + 1);
      args.push_back(a);
    }
  }
  if (name == "ising") {
    require(args.size() == 1, "ising(theta) takes one argument");
    const double t = parse_number(args[0], "theta");
    return {name, {t}, make_ising(t)};
  }
  if (name == "potts") {
    require(args.size() == 2, "potts(k,p) takes two arguments");
    const int k = parse_int(args[0], "k");
    const double p = parse_number(args[1], "p");
    return {name, {double(k), p}, make_potts(k, p)};
  }
  if (name == "uniform") {
    require(args.size() == 1, "uniform(k) takes one argument");
    const int k = parse_int(args[0], "k");
    return {name, {double(k)}, make_uniform(k)};
  }
  if (name == "walk") {
    require(args.size() == 1, "walk(graph-file) takes one argument");
    return {name, {}, make_walk_kernel(load_graph(args[0]))};
  }
  throw ValidationError("unknown kernel constructor '" + name + "'");
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string a;
  while (std::getline(ss, a, ',')) out.push_back(parse_number(a, what));
  return out;
}

// Rows separated by ';', entries by ','.
std::vector<std::vector<double>> parse_matrix(const std::string& text, const std::string& what) {
  std::vector<std::vector<double>> out;
  std::stringstream ss(text);
  std::string row;
  while (std::getline(ss, row, ';')) out.push_back(parse_list(row, what));
  return out;
}

std::vector<double> default_encoding(int states) {
  std::vector<double> f(static_cast<std::size_t>(states));
  for (int s = 0; s < states; ++s) f[s] = s;
  return f;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), "cannot open output file " + path);
  out.precision(17);
  return out;
}

json kernel_json(const KernelSpec& k) {
  json j;
  j["label"] = k.kernel.label();
  j["kind"] = k.kind;
  j["states"] = k.kernel.states();
  return j;
}

json rate_json(const RateFit& f) {
  return {{"rate", f.rate}, {"rate_low", f.rate_low}, {"rate_high", f.rate_high}, {"points", f.points}};
}

const char* pattern_name(Pattern p) {
  switch (p) {
    case Pattern::vertex: return "vertex";
    case Pattern::edge: return "edge";
    default: return "star";
  }
}

void write_series_csv(const std::string& path, const std::vector<double>& mean,
                      const std::vector<double>& se) {
  auto out = open_output(path);
  out << "sweep,mean,std_error\n";
  for (std::size_t i = 0; i < mean.size(); ++i) out << i << ',' << mean[i] << ',' << se[i] << '\n';
}

struct Options {
  std::string kernel;
  int d = 3;
  int depth = 8;
  int sweeps = 50;
  std::size_t replicas = 1000;
  std::optional<std::uint64_t> seed;
  int window = -1;
  std::string csv;
  std::string out;
  std::string graph, graph2, matrix;
  std::string encoding;
  std::string family;
  std::string nu;
  int n = 0;
  int k = 0;
  int q_deg = 0;
  int k_max = 200;
  int distance = 0;
  int index = 1;
  int levels = 0;
  int girth_l = 0;
  int r_max = 1;
  int restarts = 20;
  std::size_t samples = 256;
  bool multigraph = false;
  int retries = 10'000;
  bool no_exact = false;
  double budget = 0.0;
  int d_from = 3, d_to = 10;
};

std::uint64_t need_seed(const Options& o) {
  if (!o.seed) throw ValidationError("--seed is required for stochastic subcommands");
  return *o.seed;
}

GlauberRun glauber_run(const Options& o, int workers) {
  GlauberRun run;
  run.d = o.d;
  run.depth = o.depth;
  run.sweeps = o.sweeps;
  run.replicas = o.replicas;
  run.seed = need_seed(o);
  run.workers = workers;
  run.window_depth = o.window;
  return run;
}

json stochastic_header(const GlauberRun& run) {
  return {{"seed", run.seed}, {"replicas", run.replicas}, {"d", run.d}, {"depth", run.depth},
          {"sweeps", run.sweeps}, {"window_depth", run.window()}};
}

RegularGraph graph_from_path(const std::string& path) {
  require(!path.empty(), "a graph file is required");
  return load_graph(path);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"treelab: Markov chains on regular trees, Glauber dynamics and local statistics"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  int workers = default_workers();
  app.add_option("--workers", workers, "Worker threads (default: TREELAB_WORKERS or hardware)")
      ->check(CLI::Range(1, 1024));
  Options o;

  auto kernel_opt = [&](CLI::App* s) {
    s->add_option("--kernel", o.kernel,
                  "ising(theta) | potts(k,p) | uniform(k) | walk(graph-file) | kernel file")
        ->required();
  };
  auto d_opt = [&](CLI::App* s) { s->add_option("--d", o.d, "Tree degree")->check(CLI::Range(2, 64)); };
  auto seed_opt = [&](CLI::App* s) { s->add_option("--seed", o.seed, "Random seed (required)"); };
  auto glauber_opts = [&](CLI::App* s) {
    kernel_opt(s);
    d_opt(s);
    seed_opt(s);
    s->add_option("--depth", o.depth, "Tree depth")->check(CLI::Range(1, 40));
    s->add_option("--sweeps", o.sweeps, "Glauber sweeps")->check(CLI::Range(0, 1000000));
    s->add_option("--replicas", o.replicas, "Independent replicas");
    s->add_option("--window", o.window, "Interior window depth (default depth/2)");
  };

  auto* dob = app.add_subcommand("dobrushin", "Dobrushin coefficient by exhaustive enumeration");
  kernel_opt(dob);
  d_opt(dob);
  dob->add_option("--budget", o.budget, "Enumeration budget");

  auto* spec = app.add_subcommand("spectral", "Second-largest absolute eigenvalue of the kernel");
  kernel_opt(spec);

  auto* bmc = app.add_subcommand("bmc-sample", "Sample a branching Markov chain on the truncated tree");
  kernel_opt(bmc);
  d_opt(bmc);
  seed_opt(bmc);
  bmc->add_option("--depth", o.depth, "Tree depth")->check(CLI::Range(0, 40));
  bmc->add_option("--out", o.out, "Write 'depth index state' lines to this file");

  auto* corr = app.add_subcommand("correlation", "Correlation decay classifier");
  kernel_opt(corr);
  d_opt(corr);
  corr->add_option("--k-max", o.k_max, "Largest distance checked")->check(CLI::Range(1, 100000));
  corr->add_option("--encoding", o.encoding, "Comma-separated f(s) values (default f(s)=s)");
  corr->add_option("--distance", o.distance, "Also estimate the correlation at this distance by sampling");
  corr->add_option("--replicas", o.replicas, "Replicas for the sampled estimate");
  seed_opt(corr);
  corr->add_option("--csv", o.csv, "Write k,exact,bound series");

  auto* gfp = app.add_subcommand("glauber-fixed-point", "Check that one Glauber sweep preserves the BMC law");
  glauber_opts(gfp);
  auto* gct = app.add_subcommand("glauber-contraction", "Coupled Glauber runs from two BMC samples");
  glauber_opts(gct);
  gct->add_option("--csv", o.csv, "Write sweep,mean,std_error series");
  auto* gcv = app.add_subcommand("glauber-converge", "Glauber dynamics from an i.i.d. start");
  glauber_opts(gcv);
  gcv->add_option("--csv", o.csv, "Write sweep,mean,std_error series");
  gcv->add_option("--out", o.out, "Write the replica-0 sample configuration");

  auto* ent = app.add_subcommand("entropy-check", "Vertex, edge and star entropies of the BMC");
  kernel_opt(ent);
  d_opt(ent);

  auto* cex = app.add_subcommand("counterexample", "Expander walk counterexample arithmetic");
  cex->add_option("--k", o.k, "Vertices of the base graph")->required()->check(CLI::Range(1, 1 << 30));
  cex->add_option("--q-deg", o.q_deg, "Degree of the base graph")->required()->check(CLI::Range(1, 1 << 20));
  d_opt(cex);

  auto* gs = app.add_subcommand("graph-sample", "Sample a random regular graph (pairing model)");
  gs->add_option("--n", o.n, "Vertices")->required()->check(CLI::Range(1, 10000000));
  d_opt(gs);
  seed_opt(gs);
  gs->add_flag("--multigraph", o.multigraph, "Allow loops and multi-edges");
  gs->add_option("--retries", o.retries, "Rejection attempts for simple graphs")->check(CLI::PositiveNumber);
  gs->add_option("--girth-l", o.girth_l, "Also report the fraction of vertices on cycles of length <= L");
  gs->add_option("--out", o.out, "Write the graph file");

  auto* ent_lem = app.add_subcommand("entlem-check", "Matching-count identity by brute force");
  ent_lem->add_option("--n", o.n, "Number of points (even)")->required()->check(CLI::Range(2, 12));
  ent_lem->add_option("--nu", o.nu, "Symmetric edge law, rows ';' entries ','")->required();

  auto* eq = app.add_subcommand("eigen-quantize", "Quantized adjacency eigenvector and its equation error");
  eq->add_option("--graph", o.graph, "Graph file")->required();
  eq->add_option("--index", o.index, "Eigen index (0 = largest)");
  eq->add_option("--levels", o.levels, "Quantization levels (0 = none)");
  seed_opt(eq);

  auto* ld = app.add_subcommand("local-distance", "Colored neighborhood distance between two graphs");
  ld->add_option("--graph", o.graph, "First graph file")->required();
  ld->add_option("--graph2", o.graph2, "Second graph file")->required();
  ld->add_option("--r-max", o.r_max, "Largest radius")->check(CLI::Range(0, 20));
  ld->add_option("--k-max", o.k_max, "Largest color count")->check(CLI::Range(1, 64));
  ld->add_option("--budget", o.budget, "Exact enumeration budget (colorings)");
  ld->add_option("--samples", o.samples, "Sampled colorings per k when over budget");
  seed_opt(ld);

  auto* cm = app.add_subcommand("covering-min", "Minimum covering error of a graph");
  cm->add_option("--graph", o.graph, "Graph file")->required();
  cm->add_option("--matrix", o.matrix, "Covering matrix file")->required();
  cm->add_option("--restarts", o.restarts, "Local search restarts")->check(CLI::Range(1, 1000000));
  cm->add_option("--budget", o.budget, "Exact enumeration budget");
  cm->add_flag("--no-exact", o.no_exact, "Skip exact enumeration");
  seed_opt(cm);

  auto* e0 = app.add_subcommand("epsilon0", "Threshold below which the covering bound applies");
  e0->add_option("--family", o.family, "dominating | bipartite");
  e0->add_option("--matrix", o.matrix, "Covering matrix file (generic bound)");
  e0->add_option("--d", o.d, "Degree")->check(CLI::Range(3, 64));
  e0->add_option("--csv", o.csv, "Write eps,g scan");

  auto* dt = app.add_subcommand("dominating-table", "Dominating ratio lower bounds");
  dt->add_option("--d-from", o.d_from)->check(CLI::Range(3, 64));
  dt->add_option("--d-to", o.d_to)->check(CLI::Range(3, 64));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  json j;
  try {
    auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    j["command"] = name;

    if (name == "dobrushin") {
      const auto k = parse_kernel(o.kernel);
      const double dc = o.budget > 0 ? dobrushin_coefficient(k.kernel, o.d, o.budget)
                                     : dobrushin_coefficient(k.kernel, o.d);
      j["kernel"] = kernel_json(k);
      j["d"] = o.d;
      j["dobrushin"] = dc;
      j["d_times_dobrushin"] = o.d * dc;
      j["dobrushin_regime"] = o.d * dc < 1.0;
      if (k.kind == "ising") {
        const double ref = std::abs(k.params[0]);
        j["ising_reference"] = ref;
        j["ising_reference_match"] = std::abs(ref - dc) <= 1e-12;
      }
    } else if (name == "spectral") {
      const auto k = parse_kernel(o.kernel);
      j["kernel"] = kernel_json(k);
      j["spectral_radius"] = spectral_radius(k.kernel);
      if (k.kind == "potts") {
        const double kk = k.params[0], p = k.params[1];
        j["potts_closed_form"] = std::abs(1.0 - p * kk / (kk - 1.0));
      }
    } else if (name == "bmc-sample") {
      const auto k = parse_kernel(o.kernel);
      Stream rng(need_seed(o));
      const auto tree = build_tree(o.d, o.depth);
      const auto config = sample_bmc(k.kernel, tree, rng);
      std::vector<double> freq(static_cast<std::size_t>(k.kernel.states()), 0.0);
      for (int s : config.states) freq[s] += 1.0 / config.states.size();
      j["kernel"] = kernel_json(k);
      j["seed"] = *o.seed;
      j["d"] = o.d;
      j["depth"] = o.depth;
      j["vertices"] = config.states.size();
      j["state_frequency"] = freq;
      j["pi"] = k.kernel.pi();
      if (!o.out.empty()) {
        auto f = open_output(o.out);
        write_configuration(f, config);
        j["output"] = o.out;
      }
    } else if (name == "correlation") {
      const auto k = parse_kernel(o.kernel);
      const auto f = o.encoding.empty() ? default_encoding(k.kernel.states())
                                        : parse_list(o.encoding, "encoding");
      const auto v = classify_cordec(k.kernel, o.d, f, o.k_max);
      j["kernel"] = kernel_json(k);
      j["d"] = o.d;
      j["encoding"] = f;
      j["verdict"] = v.violates ? "VIOLATES" : "CONSISTENT";
      j["witness"] = v.violates ? json(v.witness) : json(nullptr);
      j["correlation_at_witness"] = v.violates ? json(v.correlation) : json(nullptr);
      j["bound_at_witness"] = v.violates ? json(v.bound) : json(nullptr);
      j["k_max"] = v.k_max;
      if (o.distance > 0) {
        const auto est =
            estimate_correlation(k.kernel, o.distance, f, o.replicas, need_seed(o), workers);
        j["sampled"] = {{"distance", o.distance},
                        {"value", est.value},
                        {"std_error", est.std_error},
                        {"replicas", est.replicas},
                        {"seed", est.seed},
                        {"exact", exact_correlation(k.kernel, o.distance, f)}};
      }
      if (!o.csv.empty()) {
        auto c = open_output(o.csv);
        c << "k,exact,bound\n";
        for (int kk = 1; kk <= o.k_max; ++kk)
          c << kk << ',' << exact_correlation(k.kernel, kk, f) << ',' << cordec_bound(kk, o.d) << '\n';
      }
    } else if (name == "glauber-fixed-point") {
      const auto k = parse_kernel(o.kernel);
      const auto run = glauber_run(o, workers);
      const auto rep = fixed_point_test(k.kernel, run);
      j["kernel"] = kernel_json(k);
      j.update(stochastic_header(run));
      j["mean_wake_density"] = rep.mean_wake_density;
      json checks = json::array();
      for (const auto& c : rep.checks)
        checks.push_back({{"pattern", pattern_name(c.pattern)},
                          {"tv", c.tv},
                          {"noise_floor", c.noise_floor},
                          {"max_z", c.max_z},
                          {"exact", c.exact},
                          {"empirical", c.empirical},
                          {"std_error", c.std_error}});
      j["checks"] = checks;
    } else if (name == "glauber-contraction") {
      const auto k = parse_kernel(o.kernel);
      const auto run = glauber_run(o, workers);
      const auto curve = estimate_hamming_decay(k.kernel, run);
      j["kernel"] = kernel_json(k);
      j.update(stochastic_header(run));
      j["dobrushin"] = curve.dobrushin;
      j["wake_probability"] = curve.wake_probability;
      j["contraction_factor"] = curve.contraction_factor;
      j["fit"] = rate_json(curve.fit);
      j["mean"] = curve.mean;
      j["std_error"] = curve.std_error;
      if (!o.csv.empty()) write_series_csv(o.csv, curve.mean, curve.std_error);
    } else if (name == "glauber-converge") {
      const auto k = parse_kernel(o.kernel);
      const auto run = glauber_run(o, workers);
      const auto res = converge_from_iid(k.kernel, run);
      j["kernel"] = kernel_json(k);
      j.update(stochastic_header(run));
      j["dobrushin"] = res.dobrushin;
      j["dobrushin_regime"] = res.dobrushin_regime;
      j["predicted_initial"] = res.predicted_initial;
      j["final_distance"] = res.mean.back();
      j["final_std_error"] = res.std_error.back();
      j["fit"] = rate_json(res.fit);
      j["mean"] = res.mean;
      j["std_error"] = res.std_error;
      if (!o.csv.empty()) write_series_csv(o.csv, res.mean, res.std_error);
      if (!o.out.empty()) {
        auto f = open_output(o.out);
        write_configuration(f, res.sample);
        j["output"] = o.out;
      }
    } else if (name == "entropy-check") {
      const auto k = parse_kernel(o.kernel);
      const auto r = bmc_entropy_report(k.kernel, o.d);
      const auto ev = check_edge_vertex(r, o.d);
      const auto se = check_star_edge(r, o.d);
      j["kernel"] = kernel_json(k);
      j["d"] = o.d;
      j["h_vertex"] = r.h_vertex;
      j["h_edge"] = r.h_edge;
      j["h_star"] = r.h_star;
      j["edge_vertex"] = {{"verdict", ev.passes ? "PASSES" : "FAILS"}, {"slack", ev.slack}};
      j["star_edge"] = {{"verdict", se.passes ? "PASSES" : "FAILS"}, {"slack", se.slack}};
    } else if (name == "counterexample") {
      const auto c = expander_counterexample(o.k, o.q_deg, o.d);
      j["k"] = c.k;
      j["q_deg"] = c.q_deg;
      j["d"] = c.d;
      j["lhs"] = c.lhs;
      j["rhs"] = c.rhs;
      j["threshold"] = c.threshold;
      j["ramanujan_target"] = c.ramanujan_target;
      j["edge_vertex"] = c.nontypical ? "FAILS" : "PASSES";
      j["nontypical"] = c.nontypical;
    } else if (name == "graph-sample") {
      Stream rng(need_seed(o));
      const auto g = sample_regular_graph(o.n, o.d, !o.multigraph, rng, o.retries);
      j["seed"] = *o.seed;
      j["n"] = g.size();
      j["d"] = g.degree();
      j["simple"] = g.simple();
      j["connected"] = g.connected();
      if (o.girth_l > 0) j["short_cycle_fraction"] = girth_profile(g, o.girth_l);
      if (!o.out.empty()) {
        auto f = open_output(o.out);
        write_graph(f, g);
        j["output"] = o.out;
      }
    } else if (name == "entlem-check") {
      require(o.n % 2 == 0, "--n must be even");
      const auto nu = parse_matrix(o.nu, "nu");
      const int kk = static_cast<int>(nu.size());
      std::vector<int> counts(static_cast<std::size_t>(kk), 0);
      std::vector<int> colors;
      for (int a = 0; a < kk; ++a) {
        double mass = 0.0;
        for (double x : nu[a]) mass += x;
        const double c = mass * o.n;
        require(std::abs(c - std::round(c)) < 1e-9, "nu: n * mu(a) must be an integer");
        counts[a] = static_cast<int>(std::round(c));
        colors.insert(colors.end(), counts[a], a);
      }
      require(static_cast<int>(colors.size()) == o.n, "nu: entries must sum to 1");
      const BigInt mf = matching_color_count(colors, nu);
      const BigInt h_mu = vertex_coloring_count(counts);
      const BigInt pm = pm_count(o.n);
      const BigInt h_nu = paired_coloring_count(nu, o.n);
      j["n"] = o.n;
      j["mu_counts"] = counts;
      j["matchings_respecting"] = mf.str();
      j["vertex_colorings"] = h_mu.str();
      j["perfect_matchings"] = pm.str();
      j["paired_colorings"] = h_nu.str();
      j["lhs"] = BigInt(mf * h_mu).str();
      j["rhs"] = BigInt(pm * h_nu).str();
      j["identity_holds"] = mf * h_mu == pm * h_nu;
    } else if (name == "eigen-quantize") {
      const auto g = graph_from_path(o.graph);
      const auto r = eigen_experiment(g, o.index, o.levels, o.seed.value_or(1));
      j["n"] = g.size();
      j["d"] = g.degree();
      j["index"] = r.index;
      j["eigenvalue"] = r.eigenvalue;
      j["levels"] = r.levels;
      j["level_values"] = r.level_values;
      j["error_ratio"] = r.error_ratio;
      j["tolerance"] = r.tolerance;
      j["vector"] = r.vector;
    } else if (name == "local-distance") {
      const auto g1 = graph_from_path(o.graph);
      const auto g2 = graph_from_path(o.graph2);
      const double budget = o.budget > 0 ? o.budget : 1e5;
      const auto e = dcn_estimate(g1, g2, o.r_max, o.k_max, budget, o.samples, o.seed.value_or(1));
      if (!e.exact) j["seed"] = need_seed(o);
      j["value"] = e.value;
      j["tail_bound"] = e.tail_bound;
      j["mode"] = e.exact ? "exact" : "sampled";
      j["colorings_used"] = e.colorings_used;
      j["r_max"] = o.r_max;
      j["k_max"] = o.k_max;
    } else if (name == "covering-min") {
      const auto g = graph_from_path(o.graph);
      const auto m = load_covering_matrix(o.matrix);
      j["n"] = g.size();
      j["d"] = g.degree();
      j["states"] = m.states();
      bool exact_done = false;
      if (!o.no_exact) {
        try {
          const auto ex = o.budget > 0 ? min_error_exact(g, m, o.budget) : min_error_exact(g, m);
          j["exact"] = {{"ratio", ex.ratio}, {"errors", ex.errors}, {"coloring", ex.coloring}};
          j["ratio"] = ex.ratio;
          j["mode"] = "exact";
          exact_done = true;
        } catch (const BudgetError& e) {
          // Over budget: fall back to local search when a seed is available.
          if (!o.seed) throw;
          j["exact"] = nullptr;
          j["exact_skipped"] = e.what();
        }
      }
      if (o.seed) {
        Stream rng(*o.seed);
        const auto ls = min_error_local_search(g, m, o.restarts, rng);
        j["local_search"] = {{"ratio", ls.ratio},
                             {"errors", ls.errors},
                             {"restarts", o.restarts},
                             {"seed", *o.seed},
                             {"coloring", ls.coloring}};
        if (!exact_done) {
          j["ratio"] = ls.ratio;
          j["mode"] = "local_search";
        }
      } else if (o.no_exact) {
        throw ValidationError("--seed is required for local search");
      }
    } else if (name == "epsilon0") {
      require(o.family.empty() != o.matrix.empty(), "give exactly one of --family or --matrix");
      ThresholdReport r;
      if (!o.matrix.empty()) {
        r = epsilon0(load_covering_matrix(o.matrix));
      } else if (o.family == "dominating") {
        r = epsilon0(DeltaFamily::dominating, o.d);
      } else if (o.family == "bipartite") {
        r = epsilon0(DeltaFamily::bipartite, o.d);
      } else {
        throw ValidationError("unknown family '" + o.family + "'");
      }
      j["family"] = r.delta_id;
      j["d"] = r.d;
      j["states"] = r.s_count;
      j["epsilon0"] = r.epsilon0;
      j["bracket"] = {r.bracket_low, r.bracket_high};
      j["g_bracket"] = {r.g_low, r.g_high};
      j["relative_tolerance"] = r.relative_tolerance;
      if (r.delta_id == "dominating") j["dominating_lower"] = 1.0 / (r.d + 1.0) + r.epsilon0;
      if (r.delta_id == "bipartite") j["independence_upper"] = 0.5 - r.epsilon0;
      if (!o.csv.empty()) {
        auto c = open_output(o.csv);
        c << "eps,g\n";
        for (std::size_t i = 0; i < r.scan_eps.size(); ++i) c << r.scan_eps[i] << ',' << r.scan_g[i] << '\n';
      }
    } else if (name == "dominating-table") {
      require(o.d_to >= o.d_from, "--d-to must be >= --d-from");
      json rows = json::array();
      for (const auto& r : dominating_table(o.d_from, o.d_to))
        rows.push_back({{"d", r.d}, {"epsilon0", r.epsilon0}, {"dominating_lower", r.dominating_lower}});
      j["rows"] = rows;
    }
  } catch (const BudgetError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBudget;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  out << j.dump(2) << '\n';
  return kExitOk;
}

}  // namespace treelab::cli
