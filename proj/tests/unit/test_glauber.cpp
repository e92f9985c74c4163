#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "treelab/error.hpp"
#include "treelab/glauber.hpp"
#include "treelab/kernel.hpp"
#include "treelab/prob.hpp"
#include "treelab/tree.hpp"

using namespace treelab;

namespace {

std::vector<int> distances_from(const TruncatedTree& t, int src) {
  std::vector<int> dist(t.size(), -1);
  std::queue<int> q;
  dist[src] = 0;
  q.push(src);
  while (!q.empty()) {
    const int x = q.front();
    q.pop();
    for (int y : t.neighbors(x))
      if (dist[y] < 0) {
        dist[y] = dist[x] + 1;
        q.push(y);
      }
  }
  return dist;
}

// Direct reading of the definition.
std::vector<std::uint8_t> members_by_definition(const RealField& f) {
  const auto& t = *f.tree;
  std::vector<std::uint8_t> out(t.size(), 0);
  for (std::size_t v = 0; v < t.size(); ++v) {
    if (t.depth_of(int(v)) >= t.depth()) continue;
    const auto dist = distances_from(t, int(v));
    bool top = true;
    for (std::size_t u = 0; u < t.size() && top; ++u)
      if (u != v && dist[u] <= 2)
        top = f.values[v] > f.values[u] || (f.values[v] == f.values[u] && v > u);
    out[v] = top;
  }
  return out;
}

RealField labels_like_sweep(const TreeHandle& t, Stream rng) {
  RealField f{t, std::vector<double>(t->size())};
  for (auto& x : f.values) x = rng.uniform();
  return f;
}

}  // namespace

TEST_CASE("waking set matches the definition and is 3-separated") {
  const auto t = build_tree(3, 5);
  Stream rng(1);
  for (int draw = 0; draw < 200; ++draw) {
    const auto labels = sample_uniform_labels(t, rng);
    const auto w = waking_set(labels);
    REQUIRE(w.member == members_by_definition(labels));
    const auto m = w.members();
    CHECK(m.size() == w.count);
    for (int v : m) {
      CHECK(t->has_all_neighbors(v));
      const auto dist = distances_from(*t, v);
      for (int u : m)
        if (u != v) CHECK(dist[u] >= 3);
    }
  }
}

TEST_CASE("waking set with monotone labels") {
  const auto t = build_tree(4, 3);
  RealField f{t, std::vector<double>(t->size())};
  for (std::size_t v = 0; v < t->size(); ++v) f.values[v] = double(v) / t->size();
  CHECK(waking_set(f).member == members_by_definition(f));
  std::fill(f.values.begin(), f.values.end(), 0.5);  // all ties: broken by index
  CHECK(waking_set(f).member == members_by_definition(f));
}

TEST_CASE("deep interior membership probability is 1/(d^2+1)") {
  for (int d : {3, 4}) {
    const auto t = build_tree(d, 4);
    Stream rng(d);
    const int reps = 40000;
    double hits = 0;
    for (int r = 0; r < reps; ++r) hits += waking_set(sample_uniform_labels(t, rng)).member[0];
    const double p = 1.0 / (d * d + 1);
    CHECK(std::abs(hits / reps - p) < 3.5 * std::sqrt(p * (1 - p) / reps));
  }
}

TEST_CASE("conditional distribution") {
  const auto u = conditional_dist(make_uniform(3), std::vector<int>{0, 2, 2});
  for (double p : u) CHECK(p == doctest::Approx(1.0 / 3));
  const double th = 0.2;
  const auto q = make_ising(th);
  CHECK(conditional_dist(q, std::vector<int>{1, 1, 0})[1] == doctest::Approx((1 + th) / 2));
  CHECK(conditional_dist(q, std::vector<int>{1, 1, 1})[1] ==
        doctest::Approx(0.216 / (0.216 + 0.064)));
  CHECK(conditional_dist(q, std::vector<int>{1, 1, 1})[1] == doctest::Approx(0.7714285714));
  const std::vector<std::vector<double>> walk{{0, 0.5, 0.5}, {0.5, 0, 0.5}, {0.5, 0.5, 0}};
  const TransitionKernel w(walk, {1. / 3, 1. / 3, 1. / 3});
  CHECK_THROWS_AS(conditional_dist(w, std::vector<int>{0, 1, 2}), IncompatibleConfiguration);
  CHECK_THROWS_AS(conditional_dist(q, std::vector<int>{0, 2}), ValidationError);
}

TEST_CASE("conditional distribution: normalization and permutation invariance") {
  const auto q = make_potts(4, 0.35);
  Stream rng(2);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<int> w(4);
    for (auto& x : w) x = static_cast<int>(rng() % 4);
    const auto p = conditional_dist(q, w);
    double s = 0;
    for (double x : p) s += x;
    CHECK(std::abs(s - 1.0) < 1e-12);
    auto perm = w;
    std::sort(perm.begin(), perm.end());
    do {
      const auto pp = conditional_dist(q, perm);
      for (int k = 0; k < 4; ++k) CHECK(std::abs(pp[k] - p[k]) < 1e-12);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
}

TEST_CASE("sweep touches members only") {
  const auto t = build_tree(3, 5);
  Stream rng(4);
  Configuration c = sample_bmc(make_uniform(3), t, rng);
  for (int rep = 0; rep < 50; ++rep) {
    const auto w = waking_set(labels_like_sweep(t, rng));
    const auto next = glauber_sweep(c, make_uniform(3), rng);
    for (std::size_t v = 0; v < t->size(); ++v)
      if (!w.member[v]) CHECK(next.states[v] == c.states[v]);
    c = next;
  }
}

TEST_CASE("constant start: members keep the state with probability a^d/(a^d+b^d)") {
  const double th = 0.3, a = (1 + th) / 2, b = (1 - th) / 2;
  const auto q = make_ising(th);
  const auto t = build_tree(3, 4);
  Stream rng(6);
  double woken = 0, stayed = 0;
  for (int rep = 0; rep < 20000; ++rep) {
    Configuration c{t, std::vector<int>(t->size(), 1)};
    const auto w = waking_set(labels_like_sweep(t, rng));
    const auto next = glauber_sweep(c, q, rng);
    for (int v : w.members()) {
      woken++;
      stayed += next.states[v] == 1;
    }
    for (std::size_t v = 0; v < t->size(); ++v)
      if (!w.member[v]) REQUIRE(next.states[v] == 1);
  }
  const double p = std::pow(a, 3) / (std::pow(a, 3) + std::pow(b, 3));
  CHECK(std::abs(stayed / woken - p) < 3.5 * std::sqrt(p * (1 - p) / woken));
}

TEST_CASE("maximal coupling") {
  Stream rng(3);
  const std::vector<double> p{0.2, 0.5, 0.3};
  for (int i = 0; i < 1000; ++i) {
    auto [x, y] = maximal_coupling(p, p, rng);
    REQUIRE(x == y);
  }
  for (int i = 0; i < 1000; ++i) {
    auto [x, y] = maximal_coupling(std::vector<double>{1, 0}, std::vector<double>{0, 1}, rng);
    REQUIRE(x == 0);
    REQUIRE(y == 1);
  }
  const int n = 100000;
  double diff = 0;
  for (int i = 0; i < n; ++i) {
    auto [x, y] = maximal_coupling(std::vector<double>{0.6, 0.4}, std::vector<double>{0.4, 0.6}, rng);
    diff += x != y;
  }
  CHECK(std::abs(diff / n - 0.2) < 3 * std::sqrt(0.2 * 0.8 / n));
}

TEST_CASE("maximal coupling: randomized laws, disagreement and marginals") {
  Stream rng(17);
  for (int trial = 0; trial < 8; ++trial) {
    const int k = 2 + trial % 4;
    std::vector<double> p(k), q(k);
    double sp = 0, sq = 0;
    for (int s = 0; s < k; ++s) {
      p[s] = rng.uniform();
      q[s] = rng.uniform();
      sp += p[s];
      sq += q[s];
    }
    for (int s = 0; s < k; ++s) {
      p[s] /= sp;
      q[s] /= sq;
    }
    const double tv = total_variation(p, q);
    const int n = 100000;
    double diff = 0;
    std::vector<double> mx(k, 0), my(k, 0);
    for (int i = 0; i < n; ++i) {
      auto [x, y] = maximal_coupling(p, q, rng);
      diff += x != y;
      mx[x]++;
      my[y]++;
    }
    CHECK(std::abs(diff / n - tv) < 3 * std::sqrt(tv * (1 - tv) / n) + 1e-12);
    for (int s = 0; s < k; ++s) {
      CHECK(std::abs(mx[s] / n - p[s]) < 4 * std::sqrt(p[s] * (1 - p[s]) / n));
      CHECK(std::abs(my[s] / n - q[s]) < 4 * std::sqrt(q[s] * (1 - q[s]) / n));
    }
  }
}

TEST_CASE("coupled sweep") {
  const auto t = build_tree(3, 5);
  Stream rng(8);
  const auto q = make_ising(0.4);
  const auto c = sample_bmc(q, t, rng);
  CoupledPair same{c, c, 0};
  for (int i = 0; i < 20; ++i) same = coupled_sweep(same, q, rng);
  CHECK(same.first.states == same.second.states);
  CHECK(same.sweeps == 20);

  // Uniform kernel: woken vertices agree after one sweep.
  const auto u = make_uniform(3);
  CoupledPair pair{sample_bmc(u, t, rng), sample_bmc(u, t, rng), 0};
  const auto w = waking_set(labels_like_sweep(t, rng));
  const auto next = coupled_sweep(pair, u, rng);
  for (int v : w.members()) CHECK(next.first.states[v] == next.second.states[v]);
}

TEST_CASE("one-vertex disagreement contracts as the bookkeeping predicts") {
  const double th = 0.25;
  const int d = 3;
  const auto q = make_ising(th);
  const auto t = build_tree(d, 6);
  const double dc = dobrushin_coefficient(q, d);
  const double p_wake = 1.0 / (d * d + 1);
  const int v = static_cast<int>(t->level_begin(2));
  Stream rng(10);
  std::vector<double> after;
  for (int rep = 0; rep < 20000; ++rep) {
    auto a = sample_bmc(q, t, rng);
    auto b = a;
    b.states[v] = 1 - a.states[v];
    const auto next = coupled_sweep(CoupledPair{a, b, 0}, q, rng);
    after.push_back(double(hamming_distance(next.first, next.second, t->size())));
  }
  const auto e = mean_and_stderr(after);
  CHECK(e.value <= 1 - p_wake * (1 - d * dc) + 3 * e.std_error);
}

TEST_CASE("hamming distance on a window") {
  const auto t = build_tree(3, 2);
  Configuration a{t, std::vector<int>(t->size(), 0)}, b = a;
  b.states[0] = 1;
  b.states[t->size() - 1] = 1;
  CHECK(hamming_distance(a, b, t->size()) == 2);
  CHECK(hamming_distance(a, b, t->level_end(1)) == 1);
}

TEST_CASE("rate fit") {
  std::vector<double> m, se;
  for (int i = 0; i < 40; ++i) {
    m.push_back(0.5 * std::pow(0.9, i));
    se.push_back(1e-4);
  }
  const auto f = fit_decay_rate(m, se);
  CHECK(f.rate == doctest::Approx(0.9).epsilon(1e-9));
  CHECK(f.rate_low <= f.rate);
  CHECK(f.rate_high >= f.rate);
  CHECK(f.points == 40);
  const auto none = fit_decay_rate(std::vector<double>{0.0, 0.0}, std::vector<double>{1.0, 1.0});
  CHECK(std::isnan(none.rate));
}

TEST_CASE("uniform kernel decays at exactly 1 - p_wake on the window") {
  GlauberRun run;
  run.depth = 6;
  run.sweeps = 15;
  run.replicas = 2000;
  run.seed = 3;
  const auto curve = estimate_hamming_decay(make_uniform(3), run);
  CHECK(curve.contraction_factor == doctest::Approx(0.9));
  for (int s : {5, 10, 15}) {
    const double expect = curve.mean[0] * std::pow(0.9, s);
    CHECK(std::abs(curve.mean[s] - expect) < 4 * curve.std_error[s] + 4 * curve.std_error[0]);
  }
}

TEST_CASE("ising contraction: rate and monotone curve") {
  GlauberRun run;
  run.depth = 8;
  run.sweeps = 60;
  run.replicas = 400;
  run.seed = 5;
  const auto q = make_ising(0.25);
  const auto curve = estimate_hamming_decay(q, run);
  CHECK(curve.dobrushin == doctest::Approx(0.25));
  CHECK(curve.wake_probability == doctest::Approx(0.1));
  CHECK(curve.contraction_factor == doctest::Approx(0.975));
  CHECK(curve.fit.rate <= curve.contraction_factor + 0.02);
  for (int s = 0; s < run.sweeps; ++s)
    CHECK(curve.mean[s + 1] <=
          curve.mean[s] + 3 * std::hypot(curve.std_error[s], curve.std_error[s + 1]));
}

TEST_CASE("fixed point within the noise floor") {
  GlauberRun run;
  run.depth = 6;
  run.sweeps = 10;
  run.replicas = 2000;
  run.seed = 21;
  for (const auto& q : {make_uniform(3), make_ising(0.25), make_potts(7, 0.3)}) {
    const auto rep = fixed_point_test(q, run);
    REQUIRE(rep.checks.size() == 3);
    for (const auto& c : rep.checks) CHECK(c.tv < 3 * c.noise_floor);
    CHECK(rep.mean_wake_density > 0.0);
  }
}

TEST_CASE("results do not depend on the worker count") {
  GlauberRun run;
  run.depth = 5;
  run.sweeps = 5;
  run.replicas = 300;
  run.seed = 2;
  const auto q = make_ising(0.3);
  const auto a = fixed_point_test(q, run);
  run.workers = 3;
  const auto b = fixed_point_test(q, run);
  for (int i = 0; i < 3; ++i) {
    CHECK(a.checks[i].empirical == b.checks[i].empirical);
    CHECK(a.checks[i].std_error == b.checks[i].std_error);
  }
  const auto c1 = converge_from_iid(q, run);
  run.workers = 1;
  const auto c2 = converge_from_iid(q, run);
  CHECK(c1.mean == c2.mean);
  CHECK(c1.sample.states == c2.sample.states);
}

TEST_CASE("converge from iid") {
  GlauberRun run;
  run.depth = 6;
  run.sweeps = 100;
  run.replicas = 400;
  run.seed = 4;
  const auto q = make_ising(0.25);
  const auto res = converge_from_iid(q, run);
  CHECK(res.predicted_initial == doctest::Approx(0.5));
  CHECK(std::abs(res.mean[0] - res.predicted_initial) < 3.5 * res.std_error[0]);
  CHECK(res.dobrushin_regime);
  CHECK(res.mean.back() < res.mean[0] / 5);
  CHECK(res.sample.states.size() == build_tree(3, 6)->size());

  const auto pw = TransitionKernel::from_rows({{0.5, 0.5}, {0.25, 0.75}});
  CHECK(converge_from_iid(pw, run).predicted_initial == doctest::Approx(0.5));

  run.sweeps = 150;
  const auto u = converge_from_iid(make_uniform(3), run);
  CHECK(u.mean.back() < 1e-3);
}

TEST_CASE("run validation") {
  GlauberRun run;
  run.replicas = 0;
  CHECK_THROWS_AS(fixed_point_test(make_ising(0.2), run), ValidationError);
  run.replicas = 10;
  run.window_depth = 20;
  CHECK_THROWS_AS(estimate_hamming_decay(make_ising(0.2), run), ValidationError);
}
