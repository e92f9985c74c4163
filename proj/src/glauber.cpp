#include "treelab/glauber.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "treelab/error.hpp"
#include "treelab/parallel.hpp"

namespace treelab {

namespace {

// Unnormalized-then-normalized heat-bath law written into `out`; false when
// the neighbourhood has probability zero.
bool conditional_into(const TransitionKernel& kernel, std::span<const int> neighbors,
                      std::span<double> out) {
  const int k = kernel.states();
  double z = 0.0;
  for (int s = 0; s < k; ++s) {
    double w = kernel.pi()[s];
    for (int u : neighbors) w *= kernel(s, u);
    out[s] = w;
    z += w;
  }
  if (!(z > 0.0)) return false;
  for (int s = 0; s < k; ++s) out[s] /= z;
  return true;
}

void draw_labels(std::vector<double>& labels, Stream& rng) {
  for (auto& x : labels) x = rng.uniform();
}

// member[v] = 1 iff v is eligible and the (label, index) maximum of its radius-2 ball.
std::size_t mark_members(const TruncatedTree& tree, std::span<const double> labels,
                         std::vector<int>& best1, std::vector<std::uint8_t>& member) {
  const auto n = tree.size();
  auto beats = [&](int a, int b) {
    return labels[a] > labels[b] || (labels[a] == labels[b] && a > b);
  };
  best1.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    int best = static_cast<int>(v);
    for (int u : tree.neighbors(int(v)))
      if (beats(u, best)) best = u;
    best1[v] = best;
  }
  member.assign(n, 0);
  std::size_t count = 0;
  for (std::size_t v = 0; v < n; ++v) {
    if (best1[v] != int(v) || !tree.has_all_neighbors(int(v))) continue;
    bool top = true;
    for (int u : tree.neighbors(int(v)))
      if (best1[static_cast<std::size_t>(u)] != int(v)) {
        top = false;
        break;
      }
    if (top) {
      member[v] = 1;
      ++count;
    }
  }
  return count;
}

struct SweepScratch {
  std::vector<double> labels;
  std::vector<int> best1;
  std::vector<std::uint8_t> member;
  std::vector<int> nbr_a, nbr_b;
  std::vector<double> p, q;
};

void sweep_in_place(Configuration& c, const TransitionKernel& kernel, Stream& rng,
                    SweepScratch& s) {
  const auto& tree = *c.tree;
  s.labels.resize(tree.size());
  draw_labels(s.labels, rng);
  mark_members(tree, s.labels, s.best1, s.member);
  s.p.resize(static_cast<std::size_t>(kernel.states()));
  for (std::size_t v = 0; v < tree.size(); ++v) {
    if (!s.member[v]) continue;
    s.nbr_a.clear();
    for (int u : tree.neighbors(int(v))) s.nbr_a.push_back(c.states[static_cast<std::size_t>(u)]);
    if (conditional_into(kernel, s.nbr_a, s.p)) c.states[v] = rng.categorical(s.p);
  }
}

std::pair<int, int> coupled_draw(std::span<const double> p, std::span<const double> q,
                                 Stream& rng, std::vector<double>& scratch) {
  const std::size_t k = p.size();
  scratch.resize(3 * k);
  std::span<double> common(scratch.data(), k), rp(scratch.data() + k, k),
      rq(scratch.data() + 2 * k, k);
  double overlap = 0.0;
  for (std::size_t s = 0; s < k; ++s) {
    common[s] = std::min(p[s], q[s]);
    rp[s] = p[s] - common[s];
    rq[s] = q[s] - common[s];
    overlap += common[s];
  }
  if (rng.uniform() < overlap) {
    const int x = rng.categorical(common);
    return {x, x};
  }
  const int x = rng.categorical(rp);
  const int y = rng.categorical(rq);
  return {x, y};
}

void coupled_in_place(CoupledPair& pair, const TransitionKernel& kernel, Stream& rng,
                      SweepScratch& s) {
  const auto& tree = *pair.first.tree;
  s.labels.resize(tree.size());
  draw_labels(s.labels, rng);
  mark_members(tree, s.labels, s.best1, s.member);
  const auto k = static_cast<std::size_t>(kernel.states());
  s.p.resize(k);
  s.q.resize(k);
  std::vector<double> scratch;
  for (std::size_t v = 0; v < tree.size(); ++v) {
    if (!s.member[v]) continue;
    s.nbr_a.clear();
    s.nbr_b.clear();
    for (int u : tree.neighbors(int(v))) {
      s.nbr_a.push_back(pair.first.states[static_cast<std::size_t>(u)]);
      s.nbr_b.push_back(pair.second.states[static_cast<std::size_t>(u)]);
    }
    const bool ok_a = conditional_into(kernel, s.nbr_a, s.p);
    const bool ok_b = conditional_into(kernel, s.nbr_b, s.q);
    if (ok_a && ok_b) {
      auto [x, y] = coupled_draw(s.p, s.q, rng, scratch);
      pair.first.states[v] = x;
      pair.second.states[v] = y;
    } else if (ok_a) {
      pair.first.states[v] = rng.categorical(s.p);
    } else if (ok_b) {
      pair.second.states[v] = rng.categorical(s.q);
    }
  }
  ++pair.sweeps;
}

// Replicas are processed in a fixed number of chunks so that integer
// accumulators merge identically for any worker count.
constexpr std::size_t kChunks = 64;

struct CountMoments {
  std::vector<std::int64_t> sum;
  std::vector<std::int64_t> sum_sq;

  explicit CountMoments(std::size_t cells = 0) : sum(cells, 0), sum_sq(cells, 0) {}
  void add(std::span<const std::int64_t> counts) {
    for (std::size_t i = 0; i < counts.size(); ++i) {
      sum[i] += counts[i];
      sum_sq[i] += counts[i] * counts[i];
    }
  }
  void merge(const CountMoments& o) {
    for (std::size_t i = 0; i < sum.size(); ++i) {
      sum[i] += o.sum[i];
      sum_sq[i] += o.sum_sq[i];
    }
  }
  // Mean and standard error of count / denom across replicas.
  void summarize(std::size_t replicas, double denom, std::vector<double>& mean,
                 std::vector<double>& se) const {
    const double r = static_cast<double>(replicas);
    mean.resize(sum.size());
    se.resize(sum.size());
    for (std::size_t i = 0; i < sum.size(); ++i) {
      const double s = static_cast<double>(sum[i]);
      const double ss = static_cast<double>(sum_sq[i]);
      mean[i] = s / r / denom;
      const double var = replicas > 1 ? std::max(0.0, (ss - s * s / r) / (r - 1.0)) : 0.0;
      se[i] = std::sqrt(var / r) / denom;
    }
  }
};

template <class PerReplica>
CountMoments accumulate_chunks(std::size_t replicas, std::size_t cells, int workers,
                               PerReplica&& per_replica) {
  std::vector<CountMoments> chunk(kChunks, CountMoments(cells));
  parallel_for(kChunks, workers, [&](std::size_t c) {
    std::vector<std::int64_t> counts(cells);
    for (std::size_t r = c; r < replicas; r += kChunks) {
      std::fill(counts.begin(), counts.end(), 0);
      per_replica(r, counts);
      chunk[c].add(counts);
    }
  });
  CountMoments total(cells);
  for (const auto& c : chunk) total.merge(c);
  return total;
}

void validate_run(const GlauberRun& run) {
  require(run.d >= 3, "glauber: d must be >= 3");
  require(run.depth >= 2, "glauber: depth must be >= 2");
  require(run.sweeps >= 0, "glauber: sweeps must be >= 0");
  require(run.replicas >= 2, "glauber: need at least 2 replicas");
  require(run.window() >= 0 && run.window() < run.depth, "glauber: window must be below the leaves");
}

}  // namespace

Distribution conditional_dist(const TransitionKernel& kernel, std::span<const int> neighbors) {
  for (int u : neighbors)
    require(u >= 0 && u < kernel.states(), "conditional_dist: neighbour state out of range");
  Distribution out(static_cast<std::size_t>(kernel.states()));
  if (!conditional_into(kernel, neighbors, out))
    throw IncompatibleConfiguration("conditional_dist: neighbour configuration has probability zero");
  return out;
}

std::vector<int> WakingSet::members() const {
  std::vector<int> out;
  for (std::size_t v = 0; v < member.size(); ++v)
    if (member[v]) out.push_back(static_cast<int>(v));
  return out;
}

WakingSet waking_set(const RealField& labels) {
  require(labels.tree && labels.values.size() == labels.tree->size(),
          "waking_set: label field does not match tree");
  WakingSet w;
  w.tree = labels.tree;
  std::vector<int> best1;
  w.count = mark_members(*labels.tree, labels.values, best1, w.member);
  return w;
}

Configuration glauber_sweep(Configuration config, const TransitionKernel& kernel, Stream& rng) {
  SweepScratch s;
  sweep_in_place(config, kernel, rng, s);
  return config;
}

std::pair<int, int> maximal_coupling(std::span<const double> p, std::span<const double> q,
                                     Stream& rng) {
  require(p.size() == q.size() && !p.empty(), "maximal_coupling: support sizes differ");
  std::vector<double> scratch;
  return coupled_draw(p, q, rng, scratch);
}

CoupledPair coupled_sweep(CoupledPair pair, const TransitionKernel& kernel, Stream& rng) {
  require(pair.first.tree == pair.second.tree, "coupled_sweep: configurations on different trees");
  SweepScratch s;
  coupled_in_place(pair, kernel, rng, s);
  return pair;
}

std::size_t hamming_distance(const Configuration& a, const Configuration& b,
                             std::size_t window_end) {
  window_end = std::min({window_end, a.states.size(), b.states.size()});
  std::size_t diff = 0;
  for (std::size_t v = 0; v < window_end; ++v) diff += a.states[v] != b.states[v];
  return diff;
}

RateFit fit_decay_rate(std::span<const double> mean, std::span<const double> std_error) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < mean.size(); ++i)
    if (mean[i] > 0.0 && mean[i] > 10.0 * std_error[i]) {
      xs.push_back(double(i));
      ys.push_back(std::log(mean[i]));
    }
  RateFit fit;
  fit.points = xs.size();
  if (xs.size() < 2) {
    fit.rate = fit.rate_low = fit.rate_high = std::numeric_limits<double>::quiet_NaN();
    return fit;
  }
  const double m = double(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / m;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / m;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  double rss = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (my + slope * (xs[i] - mx));
    rss += r * r;
  }
  const double se = xs.size() > 2 ? std::sqrt(rss / (m - 2.0) / sxx) : 0.0;
  fit.rate = std::exp(slope);
  fit.rate_low = std::exp(slope - 1.96 * se);
  fit.rate_high = std::exp(slope + 1.96 * se);
  return fit;
}

DecayCurve estimate_hamming_decay(const TransitionKernel& kernel, const GlauberRun& run) {
  validate_run(run);
  const auto tree = build_tree(run.d, run.depth);
  const std::size_t window_end = tree->level_end(run.window());
  const auto steps = static_cast<std::size_t>(run.sweeps) + 1;
  const Stream root(run.seed);

  auto moments = accumulate_chunks(run.replicas, steps, run.workers,
                                   [&](std::size_t r, std::vector<std::int64_t>& counts) {
    Stream rng = root.split(r);
    Stream init_a = rng.split(0), init_b = rng.split(1), dyn = rng.split(2);
    CoupledPair pair{sample_bmc(kernel, tree, init_a), sample_bmc(kernel, tree, init_b), 0};
    SweepScratch s;
    counts[0] = static_cast<std::int64_t>(hamming_distance(pair.first, pair.second, window_end));
    for (std::size_t t = 1; t < steps; ++t) {
      coupled_in_place(pair, kernel, dyn, s);
      counts[t] = static_cast<std::int64_t>(hamming_distance(pair.first, pair.second, window_end));
    }
  });

  DecayCurve curve;
  moments.summarize(run.replicas, double(window_end), curve.mean, curve.std_error);
  if (curve.mean[0] == 0.0) throw ValidationError("hamming decay: initial distance is zero");
  curve.fit = fit_decay_rate(curve.mean, curve.std_error);
  curve.dobrushin = dobrushin_coefficient(kernel, run.d);
  curve.wake_probability = 1.0 / (run.d * run.d + 1.0);
  curve.contraction_factor = 1.0 - curve.wake_probability * (1.0 - run.d * curve.dobrushin);
  return curve;
}

FixedPointReport fixed_point_test(const TransitionKernel& kernel, const GlauberRun& run) {
  validate_run(run);
  const auto tree = build_tree(run.d, run.depth);
  const int k = kernel.states();
  const std::size_t window_end = tree->level_end(run.window());
  const std::size_t edges = window_end - 1;

  FixedPointReport report;
  std::vector<JointLaw> exact;
  for (Pattern p : {Pattern::vertex, Pattern::edge, Pattern::star})
    exact.push_back(exact_bmc_marginals(kernel, p, run.d));
  const std::size_t nv = exact[0].p.size(), ne = exact[1].p.size(), ns = exact[2].p.size();
  // Last cell holds the number of woken vertices summed over sweeps.
  const std::size_t cells = nv + ne + ns + 1;
  const Stream root(run.seed);

  auto moments = accumulate_chunks(run.replicas, cells, run.workers,
                                   [&](std::size_t r, std::vector<std::int64_t>& counts) {
    Stream rng = root.split(r);
    Stream init = rng.split(0), dyn = rng.split(1);
    Configuration c = sample_bmc(kernel, tree, init);
    SweepScratch s;
    std::int64_t woken = 0;
    for (int t = 0; t < run.sweeps; ++t) {
      sweep_in_place(c, kernel, dyn, s);
      woken += static_cast<std::int64_t>(std::count(s.member.begin(), s.member.end(), 1));
    }
    std::vector<int> tuple;
    for (std::size_t v = 0; v < window_end; ++v) {
      const int sv = c.states[v];
      ++counts[static_cast<std::size_t>(sv)];
      if (v > 0) {
        const int sp = c.states[static_cast<std::size_t>(tree->parent(int(v)))];
        ++counts[nv + static_cast<std::size_t>(sp * k + sv)];
      }
      tuple.assign(1, sv);
      for (int u : tree->neighbors(int(v))) tuple.push_back(c.states[static_cast<std::size_t>(u)]);
      ++counts[nv + ne + exact[2].encode(tuple)];
    }
    counts[cells - 1] = woken;
  });

  std::vector<double> mean, se;
  const double denoms[3] = {double(window_end), double(edges), double(window_end)};
  std::size_t offset = 0;
  for (int i = 0; i < 3; ++i) {
    CountMoments part(exact[i].p.size());
    std::copy_n(moments.sum.begin() + offset, part.sum.size(), part.sum.begin());
    std::copy_n(moments.sum_sq.begin() + offset, part.sum.size(), part.sum_sq.begin());
    offset += part.sum.size();
    PatternCheck check;
    check.pattern = static_cast<Pattern>(i);
    check.exact = exact[i].p;
    part.summarize(run.replicas, denoms[i], check.empirical, check.std_error);
    check.tv = total_variation(check.empirical, check.exact);
    for (std::size_t j = 0; j < check.exact.size(); ++j) {
      check.noise_floor += 0.5 * check.std_error[j];
      const double diff = std::abs(check.empirical[j] - check.exact[j]);
      if (check.std_error[j] > 0.0)
        check.max_z = std::max(check.max_z, diff / check.std_error[j]);
      else if (diff > 1e-12)
        check.max_z = std::numeric_limits<double>::infinity();
    }
    report.checks.push_back(std::move(check));
  }
  if (run.sweeps > 0)
    report.mean_wake_density = double(moments.sum[cells - 1]) /
                               (double(run.replicas) * run.sweeps * double(tree->size()));
  return report;
}

ConvergeResult converge_from_iid(const TransitionKernel& kernel, const GlauberRun& run) {
  validate_run(run);
  const auto tree = build_tree(run.d, run.depth);
  const std::size_t window_end = tree->level_end(run.window());
  const auto steps = static_cast<std::size_t>(run.sweeps) + 1;
  const int k = kernel.states();
  const Distribution uniform(static_cast<std::size_t>(k), 1.0 / k);
  const Stream root(run.seed);

  ConvergeResult result;
  auto moments = accumulate_chunks(run.replicas, steps, run.workers,
                                   [&](std::size_t r, std::vector<std::int64_t>& counts) {
    Stream rng = root.split(r);
    Stream init_a = rng.split(0), init_b = rng.split(1), dyn = rng.split(2);
    CoupledPair pair{sample_iid(uniform, tree, init_a), sample_bmc(kernel, tree, init_b), 0};
    SweepScratch s;
    counts[0] = static_cast<std::int64_t>(hamming_distance(pair.first, pair.second, window_end));
    for (std::size_t t = 1; t < steps; ++t) {
      coupled_in_place(pair, kernel, dyn, s);
      counts[t] = static_cast<std::int64_t>(hamming_distance(pair.first, pair.second, window_end));
    }
    if (r == 0) result.sample = pair.first;
  });

  moments.summarize(run.replicas, double(window_end), result.mean, result.std_error);
  result.predicted_initial = 1.0;
  for (int s = 0; s < k; ++s) result.predicted_initial -= kernel.pi()[s] / k;
  result.fit = fit_decay_rate(result.mean, result.std_error);
  result.dobrushin = dobrushin_coefficient(kernel, run.d);
  result.dobrushin_regime = result.dobrushin < 1.0 / run.d;
  return result;
}

}  // namespace treelab
