#include "treelab/covering.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

#include "treelab/error.hpp"

namespace treelab {

CoveringMatrix::CoveringMatrix(int d, std::vector<std::vector<int>> entries)
    : s_(static_cast<int>(entries.size())), d_(d) {
  require(d >= 1, "covering matrix: d must be positive");
  require(s_ >= 1, "covering matrix: empty");
  for (const auto& r : entries) {
    require(static_cast<int>(r.size()) == s_, "covering matrix: not square");
    int sum = 0;
    for (int x : r) {
      require(x >= 0, "covering matrix: negative entry");
      sum += x;
      m_.push_back(x);
    }
    require(sum == d, "covering matrix: every row must sum to d");
  }
  for (int s = 0; s < s_; ++s) {
    std::vector<char> seen(static_cast<std::size_t>(s_), 0);
    std::vector<int> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      for (int t = 0; t < s_; ++t)
        if ((*this)(x, t) > 0 && !seen[t]) {
          seen[t] = 1;
          stack.push_back(t);
        }
    }
    require(std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; }),
            "covering matrix: support digraph is not strongly connected");
  }
}

CoveringMatrix CoveringMatrix::dominating(int d) { return CoveringMatrix(d, {{0, d}, {1, d - 1}}); }
CoveringMatrix CoveringMatrix::bipartite(int d) { return CoveringMatrix(d, {{0, d}, {d, 0}}); }

int CoveringMatrix::diameter() const {
  int diam = 0;
  for (int s = 0; s < s_; ++s) {
    std::vector<int> dist(static_cast<std::size_t>(s_), -1);
    std::queue<int> q;
    dist[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const int x = q.front();
      q.pop();
      for (int t = 0; t < s_; ++t)
        if ((*this)(x, t) > 0 && dist[t] < 0) {
          dist[t] = dist[x] + 1;
          q.push(t);
        }
    }
    diam = std::max(diam, *std::max_element(dist.begin(), dist.end()));
  }
  return diam;
}

CoveringMatrix read_covering_matrix(std::istream& in) {
  int s = 0, d = 0;
  require(static_cast<bool>(in >> s >> d), "matrix file: header must be 's_count d'");
  require(s >= 1 && s <= 64, "matrix file: s_count out of range");
  std::vector<std::vector<int>> rows(static_cast<std::size_t>(s), std::vector<int>(static_cast<std::size_t>(s)));
  for (auto& r : rows)
    for (auto& x : r) require(static_cast<bool>(in >> x), "matrix file: missing or malformed entry");
  std::string extra;
  require(!(in >> extra), "matrix file: trailing tokens");
  return CoveringMatrix(d, std::move(rows));
}

CoveringMatrix load_covering_matrix(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot open matrix file " + path);
  return read_covering_matrix(in);
}

namespace {

void check_inputs(const RegularGraph& graph, std::span<const int> coloring, const CoveringMatrix& m) {
  require(graph.degree() == m.degree(), "covering: graph degree differs from matrix row sum");
  require(static_cast<int>(coloring.size()) == graph.size(), "covering: coloring size mismatch");
  for (int c : coloring) require(c >= 0 && c < m.states(), "covering: color out of range");
}

bool covering_at(const RegularGraph& graph, std::span<const int> coloring, int v,
                 const CoveringMatrix& m, std::vector<int>& counts) {
  counts.assign(static_cast<std::size_t>(m.states()), 0);
  for (int w : graph.neighbors(v)) ++counts[static_cast<std::size_t>(coloring[w])];
  for (int q = 0; q < m.states(); ++q)
    if (counts[q] != m(coloring[v], q)) return false;
  return true;
}

int count_errors(const RegularGraph& graph, std::span<const int> coloring, const CoveringMatrix& m) {
  std::vector<int> counts;
  int errors = 0;
  for (int v = 0; v < graph.size(); ++v) errors += !covering_at(graph, coloring, v, m, counts);
  return errors;
}

// Representatives of the orbits of colors under permutations preserving M.
std::vector<int> color_orbit_representatives(const CoveringMatrix& m) {
  const int s = m.states();
  std::vector<int> rep(static_cast<std::size_t>(s));
  std::iota(rep.begin(), rep.end(), 0);
  if (s <= 8) {
    std::vector<int> perm(static_cast<std::size_t>(s));
    std::iota(perm.begin(), perm.end(), 0);
    do {
      bool preserves = true;
      for (int a = 0; a < s && preserves; ++a)
        for (int b = 0; b < s; ++b)
          if (m(perm[a], perm[b]) != m(a, b)) {
            preserves = false;
            break;
          }
      if (preserves)
        for (int a = 0; a < s; ++a) rep[perm[a]] = std::min(rep[perm[a]], rep[a]);
    } while (std::next_permutation(perm.begin(), perm.end()));
    // Propagate to fixed point.
    for (int a = 0; a < s; ++a)
      while (rep[rep[a]] != rep[a]) rep[a] = rep[rep[a]];
  }
  std::vector<int> out;
  for (int a = 0; a < s; ++a)
    if (rep[a] == a) out.push_back(a);
  return out;
}

}  // namespace

bool is_covering_at(const RegularGraph& graph, std::span<const int> coloring, int v,
                    const CoveringMatrix& m) {
  check_inputs(graph, coloring, m);
  require(v >= 0 && v < graph.size(), "is_covering_at: vertex out of range");
  std::vector<int> counts;
  return covering_at(graph, coloring, v, m, counts);
}

double error_ratio(const RegularGraph& graph, std::span<const int> coloring, const CoveringMatrix& m) {
  check_inputs(graph, coloring, m);
  return double(count_errors(graph, coloring, m)) / graph.size();
}

CoveringResult min_error_exact(const RegularGraph& graph, const CoveringMatrix& m, double budget) {
  require(graph.degree() >= 3, "min_error_exact: graph degree must be >= 3");
  require(graph.degree() == m.degree(), "min_error_exact: graph degree differs from matrix row sum");
  const int n = graph.size();
  const int s = m.states();
  if (n * std::log(double(s)) > std::log(budget) + 1e-9)
    throw BudgetError("min_error_exact: |S|^n exceeds the enumeration budget");

  // BFS order so that closed neighbourhoods complete early.
  std::vector<int> order;
  {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (int start = 0; start < n; ++start) {
      if (seen[start]) continue;
      seen[start] = 1;
      order.push_back(start);
      for (std::size_t i = order.size() - 1; i < order.size(); ++i)
        for (int w : graph.neighbors(order[i]))
          if (!seen[w]) {
            seen[w] = 1;
            order.push_back(w);
          }
    }
  }

  std::vector<int> color(static_cast<std::size_t>(n), -1);
  std::vector<int> counts(static_cast<std::size_t>(n * s), 0);
  std::vector<char> doomed(static_cast<std::size_t>(n), 0);
  int errors = 0;
  CoveringResult best;
  best.errors = n + 1;
  best.exact = true;
  const auto reps = color_orbit_representatives(m);

  auto cnt = [&](int v, int q) -> int& { return counts[static_cast<std::size_t>(v * s + q)]; };
  auto violates = [&](int v) {
    for (int q = 0; q < s; ++q)
      if (cnt(v, q) > m(color[v], q)) return true;
    return false;
  };

  auto recurse = [&](auto&& self, std::size_t pos) -> void {
    if (errors >= best.errors) return;
    if (pos == order.size()) {
      best.errors = errors;
      best.coloring = color;
      return;
    }
    const int x = order[pos];
    for (int c = 0; c < s; ++c) {
      if (pos == 0 && std::find(reps.begin(), reps.end(), c) == reps.end()) continue;
      std::vector<int> newly;
      color[x] = c;
      for (int y : graph.neighbors(x)) {
        ++cnt(y, c);
        if (color[y] >= 0 && !doomed[y] && cnt(y, c) > m(color[y], c)) {
          doomed[y] = 1;
          newly.push_back(y);
        }
      }
      if (!doomed[x] && violates(x)) {
        doomed[x] = 1;
        newly.push_back(x);
      }
      errors += static_cast<int>(newly.size());
      self(self, pos + 1);
      errors -= static_cast<int>(newly.size());
      for (int y : newly) doomed[y] = 0;
      for (int y : graph.neighbors(x)) --cnt(y, c);
      color[x] = -1;
    }
  };
  recurse(recurse, 0);
  best.ratio = double(best.errors) / n;
  return best;
}

CoveringResult min_error_local_search(const RegularGraph& graph, const CoveringMatrix& m,
                                      int restarts, Stream& rng) {
  require(restarts >= 1, "local search: restarts must be >= 1");
  require(graph.degree() == m.degree(), "local search: graph degree differs from matrix row sum");
  const int n = graph.size();
  const int s = m.states();
  const Stream root = rng.split(rng());
  CoveringResult best;
  best.errors = n + 1;
  std::vector<int> scratch;
  std::vector<char> err(static_cast<std::size_t>(n));

  for (int rep = 0; rep < restarts; ++rep) {
    Stream r = root.split(static_cast<std::uint64_t>(rep));
    std::vector<int> color(static_cast<std::size_t>(n));
    for (auto& c : color) c = static_cast<int>(r() % static_cast<std::uint64_t>(s));
    for (int v = 0; v < n; ++v) err[v] = !covering_at(graph, color, v, m, scratch);
    int errors = static_cast<int>(std::count(err.begin(), err.end(), 1));
    while (errors > 0) {
      int best_delta = 0, best_v = -1, best_c = -1;
      for (int v = 0; v < n; ++v) {
        std::vector<int> touched{v};
        for (int w : graph.neighbors(v))
          if (std::find(touched.begin(), touched.end(), w) == touched.end()) touched.push_back(w);
        const int old = color[v];
        int before = 0;
        for (int t : touched) before += err[t];
        for (int c = 0; c < s; ++c) {
          if (c == old) continue;
          color[v] = c;
          int after = 0;
          for (int t : touched) after += !covering_at(graph, color, t, m, scratch);
          if (after - before < best_delta) {
            best_delta = after - before;
            best_v = v;
            best_c = c;
          }
        }
        color[v] = old;
      }
      if (best_v < 0) break;
      color[best_v] = best_c;
      errors += best_delta;
      err[best_v] = !covering_at(graph, color, best_v, m, scratch);
      for (int w : graph.neighbors(best_v)) err[w] = !covering_at(graph, color, w, m, scratch);
    }
    if (errors < best.errors) {
      best.errors = errors;
      best.coloring = color;
    }
  }
  best.ratio = double(best.errors) / n;
  return best;
}

DeltaFamily classify_delta(const CoveringMatrix& m) {
  const int d = m.degree();
  if (m.states() == 2) {
    if (m == CoveringMatrix::dominating(d) || m == CoveringMatrix(d, {{d - 1, 1}, {d, 0}}))
      return DeltaFamily::dominating;
    if (m == CoveringMatrix::bipartite(d)) return DeltaFamily::bipartite;
  }
  return DeltaFamily::generic;
}

const char* delta_family_name(DeltaFamily family) {
  switch (family) {
    case DeltaFamily::dominating: return "dominating";
    case DeltaFamily::bipartite: return "bipartite";
    default: return "generic";
  }
}

namespace {

double generic_delta(int s, int d, int diameter, double eps) {
  double tail = 0.0;
  for (int i = 1; i <= diameter; ++i) tail += std::pow(double(d), -i);
  return 1.0 / (s * std::pow(double(d), diameter)) - eps * tail;
}

double family_delta(DeltaFamily family, int d, double eps) {
  switch (family) {
    case DeltaFamily::dominating: return (1.0 - eps) / (d + 1.0);
    case DeltaFamily::bipartite: return 0.5 - eps;
    default: break;
  }
  throw ValidationError("delta: generic family needs a covering matrix");
}

std::function<double(double)> delta_function(const CoveringMatrix& m) {
  const auto family = classify_delta(m);
  if (family != DeltaFamily::generic) {
    const int d = m.degree();
    return [family, d](double e) { return family_delta(family, d, e); };
  }
  const int s = m.states(), d = m.degree(), diam = m.diameter();
  return [s, d, diam](double e) { return generic_delta(s, d, diam, e); };
}

}  // namespace

double delta_lower_bound(const CoveringMatrix& m, double eps) {
  require(eps >= 0.0, "delta: eps must be >= 0");
  const double v = delta_function(m)(eps);
  if (!(v > 0.0)) throw ValidationError("delta: bound is not positive at this eps");
  return v;
}

double delta_lower_bound(DeltaFamily family, int d, double eps) {
  require(eps >= 0.0, "delta: eps must be >= 0");
  const double v = family_delta(family, d, eps);
  if (!(v > 0.0)) throw ValidationError("delta: bound is not positive at this eps");
  return v;
}

double threshold_gap(const std::function<double(double)>& delta, int d, int s_count, double eps) {
  // A nonpositive delta means the covering premise fails; the gap is then negative.
  const double dl = std::max(0.0, delta(eps));
  return 0.5 * (std::pow(dl, d) - eps) -
         std::sqrt(eps * std::log(double(s_count)) * (d - 1.0) / (d - 2.0));
}

ThresholdReport epsilon0(const std::function<double(double)>& delta, int d, int s_count,
                         std::string delta_id, const ThresholdOptions& options) {
  require(d >= 3, "epsilon0: d must be >= 3");
  require(s_count >= 2, "epsilon0: need at least two states");
  require(options.scan_points >= 2 && options.scan_low > 0 && options.scan_high > options.scan_low,
          "epsilon0: bad scan grid");
  ThresholdReport rep;
  rep.d = d;
  rep.s_count = s_count;
  rep.delta_id = std::move(delta_id);
  rep.relative_tolerance = options.relative_tolerance;
  auto g = [&](double e) { return threshold_gap(delta, d, s_count, e); };

  const double log_lo = std::log(options.scan_low), log_hi = std::log(options.scan_high);
  int first = -1;
  for (int i = 0; i < options.scan_points; ++i) {
    const double e = std::exp(log_lo + (log_hi - log_lo) * i / (options.scan_points - 1));
    rep.scan_eps.push_back(e);
    rep.scan_g.push_back(g(e));
    if (first < 0 && rep.scan_g.back() <= 0.0) first = i;
  }
  if (first < 0) throw BudgetError("epsilon0: no crossing found on the scan grid");
  if (first == 0) throw BudgetError("epsilon0: crossing lies below the scan grid");

  double lo = rep.scan_eps[first - 1], hi = rep.scan_eps[first];
  while (hi / lo - 1.0 > options.relative_tolerance) {
    const double mid = std::sqrt(lo * hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  rep.bracket_low = lo;
  rep.bracket_high = hi;
  rep.g_low = g(lo);
  rep.g_high = g(hi);
  rep.epsilon0 = std::sqrt(lo * hi);
  return rep;
}

ThresholdReport epsilon0(DeltaFamily family, int d, const ThresholdOptions& options) {
  require(family != DeltaFamily::generic, "epsilon0: generic family needs a covering matrix");
  return epsilon0([family, d](double e) { return family_delta(family, d, e); }, d, 2,
                  delta_family_name(family), options);
}

ThresholdReport epsilon0(const CoveringMatrix& m, const ThresholdOptions& options) {
  return epsilon0(delta_function(m), m.degree(), m.states(), delta_family_name(classify_delta(m)),
                  options);
}

std::vector<DominatingRow> dominating_table(int d_from, int d_to) {
  require(d_from >= 3 && d_to >= d_from, "dominating_table: need 3 <= d_from <= d_to");
  std::vector<DominatingRow> rows;
  for (int d = d_from; d <= d_to; ++d) {
    DominatingRow r;
    r.d = d;
    r.epsilon0 = epsilon0(DeltaFamily::dominating, d).epsilon0;
    r.dominating_lower = 1.0 / (d + 1.0) + r.epsilon0;
    rows.push_back(r);
  }
  return rows;
}

double independence_threshold(int d) { return epsilon0(DeltaFamily::bipartite, d).epsilon0; }

RigidityVerdict rigidity_check(const JointLaw& star) {
  require(star.arity >= 3, "rigidity_check: need a star law (center plus at least two leaves)");
  validate_distribution(star.p, 1e-9, "rigidity_check");
  const int k = star.states;
  const int arity = star.arity;
  constexpr double kZero = 1e-15;

  // (i) leaf 1 (coordinate 1) is a function of the other coordinates on the support.
  JointLaw rest;
  rest.states = k;
  rest.arity = arity - 1;
  rest.p.assign(star.p.size() / static_cast<std::size_t>(k), 0.0);
  std::map<std::size_t, int> leaf_value;
  RigidityVerdict v;
  v.determined = true;
  for (std::size_t i = 0; i < star.p.size(); ++i) {
    if (star.p[i] <= kZero) continue;
    auto t = star.decode(i);
    const int leaf = t[1];
    t.erase(t.begin() + 1);
    const auto key = rest.encode(t);
    rest.p[key] += star.p[i];
    auto [it, inserted] = leaf_value.emplace(key, leaf);
    if (!inserted && it->second != leaf) v.determined = false;
  }

  // (ii) distance of the remaining coordinates from an i.i.d. law.
  std::vector<std::vector<double>> marg(static_cast<std::size_t>(rest.arity),
                                        std::vector<double>(static_cast<std::size_t>(k), 0.0));
  for (std::size_t i = 0; i < rest.p.size(); ++i) {
    const auto t = rest.decode(i);
    for (int c = 0; c < rest.arity; ++c) marg[c][t[c]] += rest.p[i];
  }
  double dist = 0.0;
  for (int c = 1; c < rest.arity; ++c) dist = std::max(dist, total_variation(marg[0], marg[c]));
  std::vector<double> product(rest.p.size());
  for (std::size_t i = 0; i < rest.p.size(); ++i) {
    const auto t = rest.decode(i);
    double w = 1.0;
    for (int c = 0; c < rest.arity; ++c) w *= marg[c][t[c]];
    product[i] = w;
  }
  v.distance_from_iid = std::max(dist, total_variation(rest.p, product));
  v.rigid = v.determined && v.distance_from_iid > 1e-9;
  return v;
}

}  // namespace treelab
