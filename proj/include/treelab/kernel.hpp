#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace treelab {

class RegularGraph;

// Finite reversible Markov kernel together with its stationary law.
// Construction validates stochasticity, positivity of pi and detailed balance.
class TransitionKernel {
 public:
  static constexpr double kTolerance = 1e-12;

  TransitionKernel(std::vector<std::vector<double>> rows, std::vector<double> pi,
                   std::string label = {});

  // Stationary law is solved for; the result must still satisfy detailed balance.
  static TransitionKernel from_rows(std::vector<std::vector<double>> rows,
                                    std::string label = {});

  int states() const { return states_; }
  double operator()(int s, int t) const { return q_[static_cast<std::size_t>(s * states_ + t)]; }
  std::span<const double> row(int s) const {
    return {q_.data() + static_cast<std::size_t>(s * states_), static_cast<std::size_t>(states_)};
  }
  const std::vector<double>& pi() const { return pi_; }
  const std::string& label() const { return label_; }

  std::vector<std::vector<double>> rows() const;

 private:
  int states_;
  std::vector<double> q_;
  std::vector<double> pi_;
  std::string label_;
};

TransitionKernel make_ising(double theta);
TransitionKernel make_potts(int k, double p);
TransitionKernel make_uniform(int k);
// Simple random walk on a connected regular (multi)graph.
TransitionKernel make_walk_kernel(const RegularGraph& graph);

// Exact sup of d_TV(B_omega, B_omega') over neighbour configurations that differ
// in one slot. Enumerates multisets of the d-1 shared states times state pairs.
double dobrushin_coefficient(const TransitionKernel& kernel, int d,
                             double budget = 1e8);

// Largest |eigenvalue| of q other than the Perron eigenvalue 1.
double spectral_radius(const TransitionKernel& kernel);

// Plain-text format: one row per line, whitespace-separated decimals.
TransitionKernel read_kernel(std::istream& in, std::string label = {});
TransitionKernel load_kernel(const std::string& path);
void write_kernel(std::ostream& out, const TransitionKernel& kernel);

}  // namespace treelab
