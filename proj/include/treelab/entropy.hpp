#pragma once

#include <span>
#include <string>

#include "treelab/kernel.hpp"
#include "treelab/tree.hpp"

namespace treelab {

// Entropies are in nats throughout.
double shannon(std::span<const double> dist);

struct EntropyReport {
  int d = 3;
  double h_vertex = 0.0;
  double h_edge = 0.0;
  double h_star = 0.0;
  double slack_edge_vertex = 0.0;  // (d/2) h_edge - (d-1) h_vertex
  double slack_star_edge = 0.0;    // h_star - (d/2) h_edge
};

EntropyReport bmc_entropy_report(const TransitionKernel& kernel, int d);

struct Verdict {
  bool passes = true;
  double slack = 0.0;
};

inline constexpr double kVerdictTolerance = 1e-12;

// Necessary conditions for typicality; a failure certifies the process is
// not typical (hence not a factor of i.i.d.).
Verdict check_edge_vertex(const EntropyReport& report, int d);
Verdict check_star_edge(const EntropyReport& report, int d);

struct CounterexampleCertificate {
  bool nontypical = false;
  int k = 0;
  int q_deg = 0;
  int d = 3;
  double lhs = 0.0;            // (d/2)(ln k + ln q_deg)
  double rhs = 0.0;            // (d-1) ln k
  double threshold = 0.0;      // q_deg^(d/(d-2))
  double ramanujan_target = 0.0;  // 2 sqrt(q_deg - 1) / q_deg
};

// Random walk on a q_deg-regular graph with k vertices, as a branching chain on T_d.
CounterexampleCertificate expander_counterexample(int k, int q_deg, int d);

// Sum of coordinate entropies minus joint entropy.
double total_correlation(const JointLaw& joint);
double pinsker_tv_bound(double t);
// d_TV bound for the star minus one leaf when h(C) - h(C \ w1) <= b.
double star_tv_bound(double b, int d);

}  // namespace treelab
