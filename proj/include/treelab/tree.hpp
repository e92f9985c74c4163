#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <ostream>
#include <span>
#include <vector>

#include "treelab/kernel.hpp"
#include "treelab/prob.hpp"
#include "treelab/rng.hpp"

namespace treelab {

// Ball of radius `depth` around the root of the d-regular tree, numbered
// breadth first (root = 0). Immutable once built; share through TreeHandle.
class TruncatedTree {
 public:
  static constexpr std::size_t kDefaultBudget = std::size_t{1} << 27;

  static std::size_t vertex_count(int d, int depth);

  int degree() const { return d_; }
  int depth() const { return depth_; }
  std::size_t size() const { return parent_.size(); }

  int parent(int v) const { return parent_[static_cast<std::size_t>(v)]; }
  int depth_of(int v) const { return level_[static_cast<std::size_t>(v)]; }
  std::span<const int> neighbors(int v) const {
    auto b = offsets_[static_cast<std::size_t>(v)];
    auto e = offsets_[static_cast<std::size_t>(v) + 1];
    return {adjacency_.data() + b, e - b};
  }
  // Children occupy a contiguous index range.
  std::span<const int> children(int v) const {
    auto n = neighbors(v);
    return v == 0 ? n : n.subspan(1);
  }

  // Vertices of depth j are [level_begin(j), level_end(j)).
  std::size_t level_begin(int j) const { return level_start_[static_cast<std::size_t>(j)]; }
  std::size_t level_end(int j) const { return level_start_[static_cast<std::size_t>(j) + 1]; }

  bool has_all_neighbors(int v) const { return depth_of(v) < depth_; }

 private:
  friend std::shared_ptr<const TruncatedTree> build_tree(int, int, std::size_t);
  TruncatedTree() = default;

  int d_ = 0;
  int depth_ = 0;
  std::vector<int> parent_;
  std::vector<int> level_;
  std::vector<std::size_t> offsets_;
  std::vector<int> adjacency_;
  std::vector<std::size_t> level_start_;
};

using TreeHandle = std::shared_ptr<const TruncatedTree>;

TreeHandle build_tree(int d, int depth, std::size_t budget = TruncatedTree::kDefaultBudget);

struct Configuration {
  TreeHandle tree;
  std::vector<int> states;
};

struct RealField {
  TreeHandle tree;
  std::vector<double> values;
};

Configuration sample_bmc(const TransitionKernel& kernel, const TreeHandle& tree, Stream& rng);
Configuration sample_iid(std::span<const double> dist, const TreeHandle& tree, Stream& rng);
RealField sample_uniform_labels(const TreeHandle& tree, Stream& rng);

enum class Pattern { vertex, edge, star };

// Law of a finite pattern. Tuples are indexed lexicographically with the first
// coordinate most significant; star tuples are (center, leaf_1, ..., leaf_d).
struct JointLaw {
  int states = 0;
  int arity = 0;
  std::vector<double> p;

  std::vector<int> decode(std::size_t index) const;
  std::size_t encode(std::span<const int> tuple) const;
};

JointLaw exact_bmc_marginals(const TransitionKernel& kernel, Pattern pattern, int d = 3,
                             std::size_t budget = 10'000'000);

// Exact Pearson correlation of encoded states at distance k (transfer matrices).
double exact_correlation(const TransitionKernel& kernel, int k, std::span<const double> encoding);

struct CorrelationEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t replicas = 0;
  std::uint64_t seed = 0;
};

// Monte Carlo correlation between the root and its leftmost depth-k descendant.
CorrelationEstimate estimate_correlation(const TransitionKernel& kernel, int distance,
                                         std::span<const double> encoding, std::size_t replicas,
                                         std::uint64_t seed, int workers = 1);

double cordec_bound(int k, int d);

struct CordecVerdict {
  bool violates = false;
  int witness = 0;  // first k with correlation > bound, 0 if none
  double correlation = 0.0;
  double bound = 0.0;
  int k_max = 0;
};

CordecVerdict classify_cordec(const TransitionKernel& kernel, int d,
                              std::span<const double> encoding, int k_max);

// One line per vertex: "depth index state".
void write_configuration(std::ostream& out, const Configuration& config);

}  // namespace treelab
