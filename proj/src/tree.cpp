#include "treelab/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "treelab/error.hpp"
#include "treelab/parallel.hpp"

namespace treelab {

std::size_t TruncatedTree::vertex_count(int d, int depth) {
  std::size_t total = 1;
  std::size_t level = 1;
  for (int j = 1; j <= depth; ++j) {
    level *= static_cast<std::size_t>(j == 1 ? d : d - 1);
    total += level;
  }
  return total;
}

TreeHandle build_tree(int d, int depth, std::size_t budget) {
  require(d >= 3, "tree: degree must be >= 3");
  require(depth >= 1, "tree: depth must be >= 1");
  // Guard against overflow before computing the exact count.
  if (depth * std::log(double(d - 1)) + std::log(double(d)) > std::log(double(budget)) + 1.0)
    throw BudgetError("tree: vertex count exceeds budget");
  const std::size_t n = TruncatedTree::vertex_count(d, depth);
  if (n > budget) throw BudgetError("tree: vertex count exceeds budget");

  auto tree = std::shared_ptr<TruncatedTree>(new TruncatedTree());
  tree->d_ = d;
  tree->depth_ = depth;
  tree->parent_.resize(n);
  tree->level_.resize(n);
  tree->offsets_.resize(n + 1);

  tree->parent_[0] = -1;
  tree->level_[0] = 0;
  std::size_t next = 1;
  std::vector<std::size_t> first_child(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    const int lv = tree->level_[v];
    if (lv < depth) {
      const int kids = v == 0 ? d : d - 1;
      first_child[v] = next;
      for (int c = 0; c < kids; ++c, ++next) {
        tree->parent_[next] = static_cast<int>(v);
        tree->level_[next] = lv + 1;
      }
    }
  }
  tree->level_start_.push_back(0);
  for (int j = 0; j <= depth; ++j) {
    auto it = std::lower_bound(tree->level_.begin(), tree->level_.end(), j + 1);
    tree->level_start_.push_back(static_cast<std::size_t>(it - tree->level_.begin()));
  }
  tree->adjacency_.reserve(2 * (n - 1));
  for (std::size_t v = 0; v < n; ++v) {
    tree->offsets_[v] = tree->adjacency_.size();
    if (v != 0) tree->adjacency_.push_back(tree->parent_[v]);
    if (tree->level_[v] < depth) {
      const int kids = v == 0 ? d : d - 1;
      for (int c = 0; c < kids; ++c)
        tree->adjacency_.push_back(static_cast<int>(first_child[v]) + c);
    }
  }
  tree->offsets_[n] = tree->adjacency_.size();
  return tree;
}

Configuration sample_bmc(const TransitionKernel& kernel, const TreeHandle& tree, Stream& rng) {
  Configuration c{tree, std::vector<int>(tree->size())};
  c.states[0] = rng.categorical(kernel.pi());
  for (std::size_t v = 1; v < tree->size(); ++v)
    c.states[v] = rng.categorical(kernel.row(c.states[static_cast<std::size_t>(tree->parent(int(v)))]));
  return c;
}

Configuration sample_iid(std::span<const double> dist, const TreeHandle& tree, Stream& rng) {
  validate_distribution(dist, 1e-9, "sample_iid");
  Configuration c{tree, std::vector<int>(tree->size())};
  for (auto& s : c.states) s = rng.categorical(dist);
  return c;
}

RealField sample_uniform_labels(const TreeHandle& tree, Stream& rng) {
  RealField f{tree, std::vector<double>(tree->size())};
  for (auto& x : f.values) x = rng.uniform();
  return f;
}

std::vector<int> JointLaw::decode(std::size_t index) const {
  std::vector<int> t(static_cast<std::size_t>(arity));
  for (int i = arity - 1; i >= 0; --i) {
    t[static_cast<std::size_t>(i)] = static_cast<int>(index % static_cast<std::size_t>(states));
    index /= static_cast<std::size_t>(states);
  }
  return t;
}

std::size_t JointLaw::encode(std::span<const int> tuple) const {
  std::size_t index = 0;
  for (int s : tuple) index = index * static_cast<std::size_t>(states) + static_cast<std::size_t>(s);
  return index;
}

JointLaw exact_bmc_marginals(const TransitionKernel& kernel, Pattern pattern, int d,
                             std::size_t budget) {
  const int k = kernel.states();
  JointLaw law;
  law.states = k;
  law.arity = pattern == Pattern::vertex ? 1 : pattern == Pattern::edge ? 2 : d + 1;
  const double cells = std::pow(double(k), law.arity);
  if (cells > double(budget)) throw BudgetError("exact_bmc_marginals: table too large");
  law.p.assign(static_cast<std::size_t>(cells), 0.0);
  for (std::size_t i = 0; i < law.p.size(); ++i) {
    const auto t = law.decode(i);
    double w = kernel.pi()[t[0]];
    for (std::size_t j = 1; j < t.size(); ++j) w *= kernel(t[0], t[j]);
    law.p[i] = w;
  }
  return law;
}

namespace {

struct EncodedMoments {
  double mean = 0.0;
  double variance = 0.0;
};

EncodedMoments encoded_moments(const TransitionKernel& kernel, std::span<const double> encoding) {
  require(static_cast<int>(encoding.size()) == kernel.states(),
          "correlation: encoding length differs from state count");
  EncodedMoments m;
  for (int s = 0; s < kernel.states(); ++s) m.mean += kernel.pi()[s] * encoding[s];
  for (int s = 0; s < kernel.states(); ++s)
    m.variance += kernel.pi()[s] * (encoding[s] - m.mean) * (encoding[s] - m.mean);
  require(m.variance > 1e-15, "correlation: encoding has zero variance under pi");
  return m;
}

}  // namespace

double exact_correlation(const TransitionKernel& kernel, int k, std::span<const double> encoding) {
  require(k >= 0, "correlation: distance must be >= 0");
  const auto m = encoded_moments(kernel, encoding);
  const int n = kernel.states();
  Eigen::MatrixXd q(n, n);
  for (int s = 0; s < n; ++s)
    for (int t = 0; t < n; ++t) q(s, t) = kernel(s, t);
  Eigen::VectorXd f(n);
  for (int s = 0; s < n; ++s) f(s) = encoding[s] - m.mean;
  Eigen::VectorXd g = f;
  for (int i = 0; i < k; ++i) g = q * g;
  double cov = 0.0;
  for (int s = 0; s < n; ++s) cov += kernel.pi()[s] * f(s) * g(s);
  return cov / m.variance;
}

CorrelationEstimate estimate_correlation(const TransitionKernel& kernel, int distance,
                                         std::span<const double> encoding, std::size_t replicas,
                                         std::uint64_t seed, int workers) {
  require(distance >= 0, "correlation: distance must be >= 0");
  require(replicas >= 1000, "correlation: need at least 1000 replicas");
  encoded_moments(kernel, encoding);
  CorrelationEstimate est;
  est.replicas = replicas;
  est.seed = seed;
  if (distance == 0) {
    est.value = 1.0;
    return est;
  }
  // The root-to-descendant path of a branching chain is a stationary Markov chain.
  std::vector<double> xs(replicas), ys(replicas);
  const Stream root(seed);
  parallel_for(replicas, workers, [&](std::size_t r) {
    Stream rng = root.split(r);
    int s = rng.categorical(kernel.pi());
    xs[r] = encoding[s];
    for (int step = 0; step < distance; ++step) s = rng.categorical(kernel.row(s));
    ys[r] = encoding[s];
  });

  auto pearson = [&](std::size_t skip_begin, std::size_t skip_end) {
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0, n = 0;
    for (std::size_t i = 0; i < replicas; ++i) {
      if (i >= skip_begin && i < skip_end) continue;
      sx += xs[i];
      sy += ys[i];
      sxx += xs[i] * xs[i];
      syy += ys[i] * ys[i];
      sxy += xs[i] * ys[i];
      n += 1;
    }
    const double cov = sxy / n - (sx / n) * (sy / n);
    const double vx = sxx / n - (sx / n) * (sx / n);
    const double vy = syy / n - (sy / n) * (sy / n);
    return cov / std::sqrt(vx * vy);
  };
  est.value = pearson(0, 0);
  // Delete-a-block jackknife for the standard error.
  constexpr std::size_t kBlocks = 50;
  std::vector<double> partial(kBlocks);
  const std::size_t block = replicas / kBlocks;
  for (std::size_t b = 0; b < kBlocks; ++b)
    partial[b] = pearson(b * block, b == kBlocks - 1 ? replicas : (b + 1) * block);
  const double mean = std::accumulate(partial.begin(), partial.end(), 0.0) / kBlocks;
  double ss = 0.0;
  for (double p : partial) ss += (p - mean) * (p - mean);
  est.std_error = std::sqrt(ss * (kBlocks - 1) / kBlocks);
  return est;
}

double cordec_bound(int k, int d) {
  require(k >= 1, "cordec_bound: k must be >= 1");
  require(d >= 3, "cordec_bound: d must be >= 3");
  return (k + 1.0 - 2.0 * k / d) * std::pow(double(d - 1), -k / 2.0);
}

CordecVerdict classify_cordec(const TransitionKernel& kernel, int d,
                              std::span<const double> encoding, int k_max) {
  require(k_max >= 1, "classify_cordec: k_max must be >= 1");
  CordecVerdict v;
  v.k_max = k_max;
  for (int k = 1; k <= k_max; ++k) {
    const double corr = exact_correlation(kernel, k, encoding);
    const double bound = cordec_bound(k, d);
    if (corr > bound) {
      v.violates = true;
      v.witness = k;
      v.correlation = corr;
      v.bound = bound;
      return v;
    }
  }
  v.correlation = exact_correlation(kernel, k_max, encoding);
  v.bound = cordec_bound(k_max, d);
  return v;
}

void write_configuration(std::ostream& out, const Configuration& config) {
  for (std::size_t v = 0; v < config.states.size(); ++v)
    out << config.tree->depth_of(int(v)) << ' ' << v << ' ' << config.states[v] << '\n';
}

}  // namespace treelab
