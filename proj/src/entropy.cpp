#include "treelab/entropy.hpp"

#include <cmath>

#include <boost/multiprecision/cpp_int.hpp>

#include "treelab/error.hpp"

namespace treelab {

double shannon(std::span<const double> dist) {
  validate_distribution(dist, 1e-9, "shannon");
  double h = 0.0;
  for (double p : dist)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

EntropyReport bmc_entropy_report(const TransitionKernel& kernel, int d) {
  require(d >= 3, "entropy: d must be >= 3");
  EntropyReport r;
  r.d = d;
  r.h_vertex = shannon(kernel.pi());
  double row_entropy = 0.0;
  for (int s = 0; s < kernel.states(); ++s) row_entropy += kernel.pi()[s] * shannon(kernel.row(s));
  r.h_edge = r.h_vertex + row_entropy;
  r.h_star = r.h_vertex + d * row_entropy;
  r.slack_edge_vertex = 0.5 * d * r.h_edge - (d - 1) * r.h_vertex;
  r.slack_star_edge = r.h_star - 0.5 * d * r.h_edge;
  return r;
}

Verdict check_edge_vertex(const EntropyReport& report, int d) {
  const double slack = 0.5 * d * report.h_edge - (d - 1) * report.h_vertex;
  return {slack >= -kVerdictTolerance, slack};
}

Verdict check_star_edge(const EntropyReport& report, int d) {
  const double slack = report.h_star - 0.5 * d * report.h_edge;
  return {slack >= -kVerdictTolerance, slack};
}

CounterexampleCertificate expander_counterexample(int k, int q_deg, int d) {
  require(k > 1, "counterexample: k must be > 1");
  require(q_deg >= 3, "counterexample: q_deg must be >= 3");
  require(d >= 3, "counterexample: d must be >= 3");
  CounterexampleCertificate c;
  c.k = k;
  c.q_deg = q_deg;
  c.d = d;
  c.lhs = 0.5 * d * (std::log(double(k)) + std::log(double(q_deg)));
  c.rhs = (d - 1) * std::log(double(k));
  c.threshold = std::pow(double(q_deg), double(d) / (d - 2));
  c.ramanujan_target = 2.0 * std::sqrt(q_deg - 1.0) / q_deg;
  // k > q^(d/(d-2))  <=>  k^(d-2) > q^d, decided in exact integers.
  using boost::multiprecision::cpp_int;
  c.nontypical = boost::multiprecision::pow(cpp_int(k), static_cast<unsigned>(d - 2)) >
                 boost::multiprecision::pow(cpp_int(q_deg), static_cast<unsigned>(d));
  return c;
}

double total_correlation(const JointLaw& joint) {
  validate_distribution(joint.p, 1e-9, "total_correlation");
  double sum_marginals = 0.0;
  std::vector<double> marginal(static_cast<std::size_t>(joint.states));
  for (int coord = 0; coord < joint.arity; ++coord) {
    std::fill(marginal.begin(), marginal.end(), 0.0);
    for (std::size_t i = 0; i < joint.p.size(); ++i)
      marginal[static_cast<std::size_t>(joint.decode(i)[static_cast<std::size_t>(coord)])] +=
          joint.p[i];
    sum_marginals += shannon(marginal);
  }
  return sum_marginals - shannon(joint.p);
}

double pinsker_tv_bound(double t) {
  require(t >= -1e-12, "pinsker: total correlation must be nonnegative");
  return std::sqrt(std::max(0.0, t) / 2.0);
}

double star_tv_bound(double b, int d) {
  require(d >= 3, "star_tv_bound: d must be >= 3");
  return pinsker_tv_bound(b * (2.0 * d - 2.0) / (d - 2.0));
}

}  // namespace treelab
