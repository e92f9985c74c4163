#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <span>
#include <string>
#include <vector>

#include "treelab/graph.hpp"
#include "treelab/rng.hpp"
#include "treelab/tree.hpp"

namespace treelab {

// |S| x |S| nonnegative integer matrix with row sums d whose support digraph
// is strongly connected.
class CoveringMatrix {
 public:
  CoveringMatrix(int d, std::vector<std::vector<int>> entries);

  // [[0, d], [1, d-1]]: covering error zero iff dominating ratio 1/(d+1).
  static CoveringMatrix dominating(int d);
  // [[0, d], [d, 0]]: covering error zero iff bipartite.
  static CoveringMatrix bipartite(int d);

  int states() const { return s_; }
  int degree() const { return d_; }
  int operator()(int s, int t) const { return m_[static_cast<std::size_t>(s * s_ + t)]; }
  // Longest shortest directed path in the support digraph.
  int diameter() const;
  bool operator==(const CoveringMatrix&) const = default;

 private:
  int s_;
  int d_;
  std::vector<int> m_;
};

// First line "s_count d", then the matrix rows.
CoveringMatrix read_covering_matrix(std::istream& in);
CoveringMatrix load_covering_matrix(const std::string& path);

bool is_covering_at(const RegularGraph& graph, std::span<const int> coloring, int v,
                    const CoveringMatrix& m);
double error_ratio(const RegularGraph& graph, std::span<const int> coloring,
                   const CoveringMatrix& m);

struct CoveringResult {
  double ratio = 1.0;
  int errors = 0;
  std::vector<int> coloring;
  bool exact = false;
};

// Exact c(G, M) by branch and bound, colour-symmetry reduced at vertex 0.
CoveringResult min_error_exact(const RegularGraph& graph, const CoveringMatrix& m,
                               double budget = 1e8);
// Steepest-descent recoloring with random restarts; an upper bound on c(G, M).
CoveringResult min_error_local_search(const RegularGraph& graph, const CoveringMatrix& m,
                                      int restarts, Stream& rng);

enum class DeltaFamily { generic, dominating, bipartite };

// Lower bound delta(M, eps) on every state's probability. Matrices equal to
// the dominating or bipartite family use their sharper closed forms.
double delta_lower_bound(const CoveringMatrix& m, double eps);
double delta_lower_bound(DeltaFamily family, int d, double eps);
DeltaFamily classify_delta(const CoveringMatrix& m);
const char* delta_family_name(DeltaFamily family);

struct ThresholdOptions {
  double scan_low = 1e-40;
  double scan_high = 0.5;
  int scan_points = 64;
  double relative_tolerance = 1e-6;
};

struct ThresholdReport {
  double epsilon0 = 0.0;
  std::string delta_id;
  int d = 3;
  int s_count = 2;
  std::vector<double> scan_eps;
  std::vector<double> scan_g;
  double bracket_low = 0.0;
  double bracket_high = 0.0;
  double g_low = 0.0;   // g at bracket_low (> 0)
  double g_high = 0.0;  // g at bracket_high (<= 0)
  double relative_tolerance = 0.0;
};

// g(eps) = 0.5 (delta(eps)^d - eps) - sqrt(eps ln|S| (d-1)/(d-2)).
double threshold_gap(const std::function<double(double)>& delta, int d, int s_count, double eps);

ThresholdReport epsilon0(const std::function<double(double)>& delta, int d, int s_count,
                         std::string delta_id, const ThresholdOptions& options = {});
ThresholdReport epsilon0(DeltaFamily family, int d, const ThresholdOptions& options = {});
ThresholdReport epsilon0(const CoveringMatrix& m, const ThresholdOptions& options = {});

struct DominatingRow {
  int d = 3;
  double epsilon0 = 0.0;
  double dominating_lower = 0.0;  // 1/(d+1) + eps0
};

std::vector<DominatingRow> dominating_table(int d_from, int d_to);
// eps0 for the bipartite matrix; independence ratio is at most 1/2 - eps0.
double independence_threshold(int d);

struct RigidityVerdict {
  bool rigid = false;
  bool determined = false;         // leaf 1 is a function of the other coordinates
  double distance_from_iid = 0.0;  // TV from the product of identical marginals
};

// Star law over (center, leaf_1..leaf_d).
RigidityVerdict rigidity_check(const JointLaw& star);

}  // namespace treelab
