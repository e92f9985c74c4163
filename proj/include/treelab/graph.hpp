#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "treelab/rng.hpp"

namespace treelab {

using BigInt = boost::multiprecision::cpp_int;

// d-regular multigraph as a perfect matching of n*d half-edge slots.
// Slot i belongs to vertex i / d. A loop uses two slots of the same vertex.
class RegularGraph {
 public:
  RegularGraph(int n, int d, std::vector<int> mate);
  // Edges are unordered; slots are assigned in edge order.
  static RegularGraph from_edges(int n, int d, std::span<const std::pair<int, int>> edges);

  int size() const { return n_; }
  int degree() const { return d_; }
  std::span<const int> mate() const { return mate_; }
  // Neighbour per slot, so multi-edges repeat and a loop lists v twice.
  std::span<const int> neighbors(int v) const {
    return {neighbor_.data() + static_cast<std::size_t>(v) * d_, static_cast<std::size_t>(d_)};
  }
  int multiplicity(int u, int v) const;
  bool simple() const { return simple_; }
  bool connected() const;
  std::vector<std::pair<int, int>> edges() const;

 private:
  int n_;
  int d_;
  std::vector<int> mate_;
  std::vector<int> neighbor_;
  bool simple_ = true;
};

RegularGraph sample_regular_graph(int n, int d, bool simple, Stream& rng,
                                  int retry_budget = 10'000);

// Header "n d", then one "u v" line per edge (multi-edges repeated).
RegularGraph read_graph(std::istream& in);
RegularGraph load_graph(const std::string& path);
void write_graph(std::ostream& out, const RegularGraph& graph);

// (m-1)!!, the number of perfect matchings of m points.
BigInt pm_count(int m);

// Matchings of colored points whose directed-edge color law equals nu exactly.
// nu is a square matrix over colors; each matching edge contributes both
// orientations with weight 1/n.
BigInt matching_color_count(std::span<const int> colors,
                            const std::vector<std::vector<double>>& nu);

// Colorings of n labelled points with the given color counts (multinomial).
BigInt vertex_coloring_count(std::span<const int> color_counts);
// Endpoint colorings of a fixed matching on n points with directed-edge law nu.
BigInt paired_coloring_count(const std::vector<std::vector<double>>& nu, int n);

// Fraction of vertices on a cycle of length <= L.
double girth_profile(const RegularGraph& graph, int L);

struct EigenReport {
  int index = 0;
  double eigenvalue = 0.0;
  int levels = 0;                   // 0 = no quantization
  std::vector<double> level_values;
  std::vector<double> vector;       // quantized (or exact) eigenvector values
  double error_ratio = 0.0;
  double tolerance = 0.0;
};

// Adjacency eigenpair `index` (0 = largest eigenvalue), quantized to `levels`
// values by 1-D k-means; reports where the eigenvector equation breaks.
EigenReport eigen_experiment(const RegularGraph& graph, int index, int levels,
                             std::uint64_t seed = 1, double tolerance = 1e-8);

struct KMeans1D {
  std::vector<double> centers;
  std::vector<int> assignment;
  double cost = 0.0;
};

KMeans1D kmeans_1d(std::span<const double> values, int m, int restarts, std::uint64_t seed);

}  // namespace treelab
