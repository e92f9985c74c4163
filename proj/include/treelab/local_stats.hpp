#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "treelab/graph.hpp"

namespace treelab {

// Rooted vertex-colored multigraph; loops and repeated edges allowed.
struct RootedColoredGraph {
  int root = 0;
  std::vector<int> color;
  std::vector<std::pair<int, int>> edges;

  int size() const { return static_cast<int>(color.size()); }
};

// Canonical byte code: equal iff root- and color-preserving isomorphic.
using CanonicalBall = std::string;

inline constexpr std::size_t kMaxBallVertices = 200;

CanonicalBall canonical_ball(const RootedColoredGraph& ball,
                             std::size_t max_vertices = kMaxBallVertices);

// Subgraph induced on vertices within distance r of root, root relabelled 0.
RootedColoredGraph extract_ball(const RegularGraph& graph, std::span<const int> coloring,
                                int root, int r);

class BallDistribution {
 public:
  void add(const CanonicalBall& code, double mass) { probs_[code] += mass; }
  const std::map<CanonicalBall, double>& probabilities() const { return probs_; }
  double total() const;
  bool operator==(const BallDistribution&) const = default;

 private:
  std::map<CanonicalBall, double> probs_;
};

// mu_{r,G,f}: law of the colored r-ball around a uniform root.
BallDistribution ball_distribution(const RegularGraph& graph, std::span<const int> coloring, int r);
inline BallDistribution bs_ball_sample(const RegularGraph& graph, std::span<const int> coloring,
                                       int r) {
  return ball_distribution(graph, coloring, r);
}

double tv_distance(const BallDistribution& a, const BallDistribution& b);
double hausdorff_distance(std::span<const BallDistribution> a, std::span<const BallDistribution> b);

// Upper bound on per-coloring TV between mu_{r,G,f} and mu_{r,G',f} when G and
// G' share a vertex set and differ in `changed_edges` edges.
double edge_change_tv_bound(int changed_edges, int d, int r, int n);

struct DcnEstimate {
  double value = 0.0;
  double tail_bound = 0.0;  // 2^-r_max + 2^-k_max
  bool exact = true;        // false: sampled colorings, value is an estimate
  std::size_t colorings_used = 0;
};

DcnEstimate dcn_estimate(const RegularGraph& g1, const RegularGraph& g2, int r_max, int k_max,
                         double coloring_budget = 1e5, std::size_t samples = 256,
                         std::uint64_t seed = 1);

// Sorted "code_hex,probability" lines.
void write_ball_distribution_csv(std::ostream& out, const BallDistribution& dist);

}  // namespace treelab
