#include "treelab/local_stats.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include "treelab/error.hpp"

namespace treelab {

namespace {

struct BallView {
  int n = 0;
  std::vector<int> color;
  std::vector<int> dist;
  std::vector<int> adj;  // n*n multiplicities; diagonal counts loops
  std::vector<std::vector<int>> nbrs;  // distinct neighbours (including self for loops)

  int a(int u, int v) const { return adj[static_cast<std::size_t>(u * n + v)]; }
};

BallView make_view(const RootedColoredGraph& g) {
  BallView b;
  b.n = g.size();
  b.color = g.color;
  b.adj.assign(static_cast<std::size_t>(b.n * b.n), 0);
  for (auto [u, v] : g.edges) {
    require(u >= 0 && u < b.n && v >= 0 && v < b.n, "canonical_ball: edge endpoint out of range");
    if (u == v) {
      ++b.adj[static_cast<std::size_t>(u * b.n + u)];
    } else {
      ++b.adj[static_cast<std::size_t>(u * b.n + v)];
      ++b.adj[static_cast<std::size_t>(v * b.n + u)];
    }
  }
  b.nbrs.resize(static_cast<std::size_t>(b.n));
  for (int u = 0; u < b.n; ++u)
    for (int v = 0; v < b.n; ++v)
      if (b.a(u, v) > 0) b.nbrs[u].push_back(v);
  b.dist.assign(static_cast<std::size_t>(b.n), b.n + 1);
  std::queue<int> q;
  b.dist[g.root] = 0;
  q.push(g.root);
  while (!q.empty()) {
    const int x = q.front();
    q.pop();
    for (int y : b.nbrs[x])
      if (b.dist[y] > b.dist[x] + 1) {
        b.dist[y] = b.dist[x] + 1;
        q.push(y);
      }
  }
  return b;
}

std::string tree_code(const BallView& b, int v, int parent) {
  std::vector<std::string> kids;
  for (int w : b.nbrs[v])
    if (w != parent) kids.push_back(tree_code(b, w, v));
  std::sort(kids.begin(), kids.end());
  std::string out = "(" + std::to_string(b.color[v]);
  for (auto& k : kids) out += k;
  return out + ")";
}

// Equitable refinement; cell ids stay ordered consistently with the input ids.
int refine(const BallView& b, std::vector<int>& cell) {
  int cells = static_cast<int>(std::set<int>(cell.begin(), cell.end()).size());
  while (true) {
    std::vector<std::pair<std::vector<int>, int>> sig(static_cast<std::size_t>(b.n));
    for (int v = 0; v < b.n; ++v) {
      std::vector<int> s{cell[v]};
      std::vector<std::pair<int, int>> around;
      for (int u : b.nbrs[v]) around.emplace_back(cell[u], b.a(v, u));
      std::sort(around.begin(), around.end());
      for (auto [c, m] : around) {
        s.push_back(c);
        s.push_back(m);
      }
      sig[v] = {std::move(s), v};
    }
    std::vector<std::vector<int>> keys;
    for (auto& s : sig) keys.push_back(s.first);
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    for (int v = 0; v < b.n; ++v)
      cell[v] = static_cast<int>(std::lower_bound(keys.begin(), keys.end(), sig[v].first) - keys.begin());
    const int next = static_cast<int>(keys.size());
    if (next == cells) return cells;
    cells = next;
  }
}

bool twins(const BallView& b, int u, int w) {
  if (b.a(u, u) != b.a(w, w)) return false;
  for (int x = 0; x < b.n; ++x)
    if (x != u && x != w && b.a(u, x) != b.a(w, x)) return false;
  return true;
}

struct Search {
  const BallView& b;
  std::string best;
  bool have = false;
  std::size_t nodes = 0;
  static constexpr std::size_t kNodeBudget = 2'000'000;

  std::string certificate(const std::vector<int>& cell) const {
    std::vector<int> order(static_cast<std::size_t>(b.n));
    for (int v = 0; v < b.n; ++v) order[cell[v]] = v;
    std::string s = "G" + std::to_string(b.n) + "|";
    for (int v : order) s += std::to_string(b.dist[v]) + "," + std::to_string(b.color[v]) + ";";
    s += "|";
    for (int i = 0; i < b.n; ++i)
      for (int j = i; j < b.n; ++j) s += std::to_string(b.a(order[i], order[j])) + ",";
    return s;
  }

  void run(std::vector<int> cell) {
    if (++nodes > kNodeBudget) throw BudgetError("canonical_ball: search budget exceeded");
    const int cells = refine(b, cell);
    if (cells == b.n) {
      auto c = certificate(cell);
      if (!have || c < best) {
        best = std::move(c);
        have = true;
      }
      return;
    }
    std::vector<int> size(static_cast<std::size_t>(cells), 0);
    for (int c : cell) ++size[c];
    int target = 0;
    while (size[target] < 2) ++target;
    std::vector<int> members;
    for (int v = 0; v < b.n; ++v)
      if (cell[v] == target) members.push_back(v);
    std::vector<int> reps;
    for (int v : members) {
      bool covered = false;
      for (int r : reps)
        if (twins(b, r, v)) {
          covered = true;
          break;
        }
      if (!covered) reps.push_back(v);
    }
    for (int v : reps) {
      std::vector<int> next(cell.size());
      for (int x = 0; x < b.n; ++x) next[x] = 2 * cell[x] + (cell[x] == target && x != v ? 1 : 0);
      run(std::move(next));
    }
  }
};

}  // namespace

CanonicalBall canonical_ball(const RootedColoredGraph& ball, std::size_t max_vertices) {
  require(ball.size() >= 1, "canonical_ball: empty ball");
  require(ball.root >= 0 && ball.root < ball.size(), "canonical_ball: root out of range");
  if (static_cast<std::size_t>(ball.size()) > max_vertices)
    throw BudgetError("canonical_ball: ball exceeds the vertex budget");
  const BallView b = make_view(ball);

  bool connected = std::all_of(b.dist.begin(), b.dist.end(), [&](int x) { return x <= b.n; });
  if (connected && static_cast<int>(ball.edges.size()) == b.n - 1)
    return "T" + tree_code(b, ball.root, -1);

  // Initial partition by (distance from root, color).
  std::vector<std::pair<int, int>> keys;
  for (int v = 0; v < b.n; ++v) keys.emplace_back(b.dist[v], b.color[v]);
  auto sorted = keys;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<int> cell(static_cast<std::size_t>(b.n));
  for (int v = 0; v < b.n; ++v)
    cell[v] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), keys[v]) - sorted.begin());
  Search s{b, {}};
  s.run(std::move(cell));
  return s.best;
}

RootedColoredGraph extract_ball(const RegularGraph& graph, std::span<const int> coloring, int root,
                                int r) {
  require(static_cast<int>(coloring.size()) == graph.size(), "extract_ball: coloring size mismatch");
  require(r >= 0, "extract_ball: radius must be >= 0");
  const int n = graph.size();
  const int d = graph.degree();
  std::vector<int> local(static_cast<std::size_t>(n), -1), dist(static_cast<std::size_t>(n), -1);
  std::vector<int> order{root};
  local[root] = 0;
  dist[root] = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const int x = order[i];
    if (dist[x] == r) continue;
    for (int y : graph.neighbors(x))
      if (local[y] < 0) {
        local[y] = static_cast<int>(order.size());
        dist[y] = dist[x] + 1;
        order.push_back(y);
      }
  }
  RootedColoredGraph ball;
  ball.root = 0;
  for (int v : order) ball.color.push_back(coloring[v]);
  const auto mate = graph.mate();
  for (int v : order)
    for (int s = v * d; s < (v + 1) * d; ++s) {
      const int w = mate[s] / d;
      if (s < mate[s] && local[w] >= 0) ball.edges.emplace_back(local[v], local[w]);
    }
  return ball;
}

double BallDistribution::total() const {
  double t = 0.0;
  for (const auto& [code, p] : probs_) t += p;
  return t;
}

BallDistribution ball_distribution(const RegularGraph& graph, std::span<const int> coloring, int r) {
  std::map<CanonicalBall, int> counts;
  for (int v = 0; v < graph.size(); ++v) ++counts[canonical_ball(extract_ball(graph, coloring, v, r))];
  BallDistribution dist;
  for (const auto& [code, c] : counts) dist.add(code, double(c) / graph.size());
  return dist;
}

double tv_distance(const BallDistribution& a, const BallDistribution& b) {
  const auto& pa = a.probabilities();
  const auto& pb = b.probabilities();
  double sum = 0.0;
  auto ia = pa.begin();
  auto ib = pb.begin();
  while (ia != pa.end() || ib != pb.end()) {
    if (ib == pb.end() || (ia != pa.end() && ia->first < ib->first)) {
      sum += std::abs(ia->second);
      ++ia;
    } else if (ia == pa.end() || ib->first < ia->first) {
      sum += std::abs(ib->second);
      ++ib;
    } else {
      sum += std::abs(ia->second - ib->second);
      ++ia;
      ++ib;
    }
  }
  return 0.5 * sum;
}

double hausdorff_distance(std::span<const BallDistribution> a, std::span<const BallDistribution> b) {
  require(!a.empty() && !b.empty(), "hausdorff_distance: sets must be non-empty");
  auto directed = [](std::span<const BallDistribution> from, std::span<const BallDistribution> to) {
    double worst = 0.0;
    for (const auto& x : from) {
      double nearest = 1.0;
      for (const auto& y : to) {
        nearest = std::min(nearest, tv_distance(x, y));
        if (nearest == 0.0) break;
      }
      worst = std::max(worst, nearest);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

double edge_change_tv_bound(int changed_edges, int d, int r, int n) {
  require(n > 0, "edge_change_tv_bound: n must be positive");
  return changed_edges * 2.0 * std::pow(double(d + 1), r) / n;
}

namespace {

std::vector<BallDistribution> unique_distributions(std::vector<BallDistribution> all) {
  std::vector<BallDistribution> out;
  std::set<std::string> seen;
  for (auto& d : all) {
    std::ostringstream key;
    key.precision(17);
    for (const auto& [code, p] : d.probabilities()) key << code << '=' << p << '\n';
    if (seen.insert(key.str()).second) out.push_back(std::move(d));
  }
  return out;
}

std::vector<std::vector<int>> colorings_for(int n, int k, bool exact, std::size_t samples,
                                            const Stream& stream) {
  std::vector<std::vector<int>> out;
  if (exact) {
    std::vector<int> c(static_cast<std::size_t>(n), 0);
    while (true) {
      out.push_back(c);
      int i = 0;
      while (i < n && ++c[i] == k) c[i++] = 0;
      if (i == n) break;
    }
  } else {
    for (std::size_t s = 0; s < samples; ++s) {
      const Stream one = stream.split(s);
      std::vector<int> c(static_cast<std::size_t>(n));
      for (int v = 0; v < n; ++v) c[v] = static_cast<int>(one.at(static_cast<std::uint64_t>(v)) % k);
      out.push_back(std::move(c));
    }
  }
  return out;
}

}  // namespace

DcnEstimate dcn_estimate(const RegularGraph& g1, const RegularGraph& g2, int r_max, int k_max,
                         double coloring_budget, std::size_t samples, std::uint64_t seed) {
  require(r_max >= 1 && k_max >= 1, "dcn_estimate: r_max and k_max must be >= 1");
  DcnEstimate est;
  est.tail_bound = std::pow(2.0, -r_max) + std::pow(2.0, -k_max);
  for (int k = 1; k <= k_max; ++k) {
    const bool exact = std::pow(double(k), g1.size()) <= coloring_budget &&
                       std::pow(double(k), g2.size()) <= coloring_budget;
    est.exact = est.exact && exact;
    const Stream stream = Stream(seed).split(static_cast<std::uint64_t>(k));
    const auto c1 = colorings_for(g1.size(), k, exact, samples, stream);
    const auto c2 = colorings_for(g2.size(), k, exact, samples, stream);
    est.colorings_used += c1.size() + c2.size();
    for (int r = 1; r <= r_max; ++r) {
      std::vector<BallDistribution> q1, q2;
      for (const auto& c : c1) q1.push_back(ball_distribution(g1, c, r));
      for (const auto& c : c2) q2.push_back(ball_distribution(g2, c, r));
      const auto u1 = unique_distributions(std::move(q1));
      const auto u2 = unique_distributions(std::move(q2));
      est.value += std::pow(2.0, -k - r) * hausdorff_distance(u1, u2);
    }
  }
  return est;
}

void write_ball_distribution_csv(std::ostream& out, const BallDistribution& dist) {
  std::vector<std::pair<std::string, double>> rows;
  for (const auto& [code, p] : dist.probabilities()) {
    std::ostringstream hex;
    for (unsigned char ch : code) hex << std::hex << std::setw(2) << std::setfill('0') << int(ch);
    rows.emplace_back(hex.str(), p);
  }
  std::sort(rows.begin(), rows.end());
  auto old = out.precision(17);
  out << "code_hex,probability\n";
  for (const auto& [h, p] : rows) out << h << ',' << p << '\n';
  out.precision(old);
}

}  // namespace treelab
