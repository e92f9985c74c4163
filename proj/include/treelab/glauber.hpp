#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "treelab/kernel.hpp"
#include "treelab/prob.hpp"
#include "treelab/rng.hpp"
#include "treelab/tree.hpp"

namespace treelab {

// Heat-bath law of a vertex given its neighbours' states:
// P(s | omega) proportional to pi[s] * prod_u q[s][omega_u].
// Throws IncompatibleConfiguration when every weight vanishes.
Distribution conditional_dist(const TransitionKernel& kernel, std::span<const int> neighbors);

// Vertices whose label beats every other label within distance 2. Only
// vertices with their full neighbourhood present are eligible; ties go to
// the larger vertex index.
struct WakingSet {
  TreeHandle tree;
  std::vector<std::uint8_t> member;
  std::size_t count = 0;

  double density() const { return member.empty() ? 0.0 : double(count) / double(member.size()); }
  std::vector<int> members() const;
};

WakingSet waking_set(const RealField& labels);

// One factor-of-i.i.d. Glauber step: fresh labels, waking set, heat-bath
// resampling of every member. Members whose neighbourhood is impossible under
// the chain keep their state.
Configuration glauber_sweep(Configuration config, const TransitionKernel& kernel, Stream& rng);

// Maximal coupling: marginals p and q, P(X != Y) = d_TV(p, q).
std::pair<int, int> maximal_coupling(std::span<const double> p, std::span<const double> q,
                                     Stream& rng);

struct CoupledPair {
  Configuration first;
  Configuration second;
  std::size_t sweeps = 0;
};

// Shared labels and waking set; each member resampled by maximal coupling.
CoupledPair coupled_sweep(CoupledPair pair, const TransitionKernel& kernel, Stream& rng);

// Disagreements among vertices [0, window_end).
std::size_t hamming_distance(const Configuration& a, const Configuration& b,
                             std::size_t window_end);

struct GlauberRun {
  int d = 3;
  int depth = 8;
  int sweeps = 50;
  std::size_t replicas = 1000;
  std::uint64_t seed = 1;
  int workers = 1;
  int window_depth = -1;  // interior window; -1 means floor(depth / 2)

  int window() const { return window_depth < 0 ? depth / 2 : window_depth; }
};

struct RateFit {
  double rate = 1.0;
  double rate_low = 1.0;
  double rate_high = 1.0;
  std::size_t points = 0;
};

// Log-linear least squares over sweeps whose mean exceeds 10 standard errors.
RateFit fit_decay_rate(std::span<const double> mean, std::span<const double> std_error);

struct DecayCurve {
  std::vector<double> mean;       // mean interior disagreement fraction, index = sweep
  std::vector<double> std_error;
  RateFit fit;
  double dobrushin = 0.0;
  double wake_probability = 0.0;
  double contraction_factor = 0.0;  // 1 - p_wake (1 - d D)
};

DecayCurve estimate_hamming_decay(const TransitionKernel& kernel, const GlauberRun& run);

struct PatternCheck {
  Pattern pattern = Pattern::vertex;
  std::vector<double> exact;
  std::vector<double> empirical;
  std::vector<double> std_error;  // per cell, across replicas
  double tv = 0.0;
  double noise_floor = 0.0;       // 0.5 * sum of per-cell standard errors
  double max_z = 0.0;             // max |empirical - exact| / std_error
};

struct FixedPointReport {
  std::vector<PatternCheck> checks;  // vertex, edge, star
  double mean_wake_density = 0.0;
};

FixedPointReport fixed_point_test(const TransitionKernel& kernel, const GlauberRun& run);

struct ConvergeResult {
  Configuration sample;          // G^n applied to an i.i.d. start, replica 0
  std::vector<double> mean;      // coupled disagreement with an exact BMC copy
  std::vector<double> std_error;
  double predicted_initial = 0.0;
  RateFit fit;
  double dobrushin = 0.0;
  bool dobrushin_regime = false;
};

ConvergeResult converge_from_iid(const TransitionKernel& kernel, const GlauberRun& run);

}  // namespace treelab
