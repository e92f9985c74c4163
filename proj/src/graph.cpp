#include "treelab/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

#include <Eigen/Dense>

#include "treelab/error.hpp"

namespace treelab {

RegularGraph::RegularGraph(int n, int d, std::vector<int> mate)
    : n_(n), d_(d), mate_(std::move(mate)) {
  require(n >= 1 && d >= 1, "graph: n and d must be positive");
  const auto slots = static_cast<std::size_t>(n) * static_cast<std::size_t>(d);
  require(mate_.size() == slots, "graph: pairing size differs from n*d");
  for (std::size_t i = 0; i < slots; ++i) {
    const int m = mate_[i];
    require(m >= 0 && static_cast<std::size_t>(m) < slots, "graph: pairing slot out of range");
    require(static_cast<std::size_t>(m) != i, "graph: pairing has a fixed point");
    require(mate_[static_cast<std::size_t>(m)] == static_cast<int>(i),
            "graph: pairing is not an involution");
  }
  neighbor_.resize(slots);
  for (std::size_t i = 0; i < slots; ++i) neighbor_[i] = mate_[i] / d_;
  for (int v = 0; v < n_ && simple_; ++v) {
    auto nb = neighbors(v);
    std::vector<int> sorted(nb.begin(), nb.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() ||
        std::binary_search(sorted.begin(), sorted.end(), v))
      simple_ = false;
  }
}

RegularGraph RegularGraph::from_edges(int n, int d, std::span<const std::pair<int, int>> edges) {
  require(n >= 1 && d >= 1, "graph: n and d must be positive");
  require(static_cast<long>(edges.size()) * 2 == static_cast<long>(n) * d,
          "graph: edge count must be n*d/2");
  std::vector<int> fill(static_cast<std::size_t>(n), 0);
  std::vector<int> mate(static_cast<std::size_t>(n) * d);
  auto take = [&](int v) {
    require(v >= 0 && v < n, "graph: vertex out of range");
    require(fill[v] < d, "graph: vertex degree exceeds d");
    return v * d + fill[v]++;
  };
  for (auto [u, v] : edges) {
    const int a = take(u);
    const int b = take(v);
    mate[a] = b;
    mate[b] = a;
  }
  return RegularGraph(n, d, std::move(mate));
}

int RegularGraph::multiplicity(int u, int v) const {
  const auto nb = neighbors(u);
  const int c = static_cast<int>(std::count(nb.begin(), nb.end(), v));
  return u == v ? c / 2 : c;
}

bool RegularGraph::connected() const {
  std::vector<char> seen(static_cast<std::size_t>(n_), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : neighbors(v))
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
  }
  return count == n_;
}

std::vector<std::pair<int, int>> RegularGraph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (std::size_t i = 0; i < mate_.size(); ++i)
    if (static_cast<int>(i) < mate_[i]) out.emplace_back(static_cast<int>(i) / d_, mate_[i] / d_);
  return out;
}

RegularGraph sample_regular_graph(int n, int d, bool simple, Stream& rng, int retry_budget) {
  require(n >= 1 && d >= 1, "graph: n and d must be positive");
  require((static_cast<long>(n) * d) % 2 == 0, "graph: n*d must be even");
  require(retry_budget >= 1, "graph: retry budget must be positive");
  const auto slots = static_cast<std::size_t>(n) * static_cast<std::size_t>(d);
  std::vector<int> free(slots), mate(slots);
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  // Half-edges are matched one at a time. For simple graphs an attempt is
  // abandoned at the first loop or repeated edge, which rejects exactly the
  // same pairings as checking the finished one.
  for (int attempt = 0; attempt < retry_budget; ++attempt) {
    std::iota(free.begin(), free.end(), 0);
    for (auto& a : adj) a.clear();
    std::size_t left = slots;
    bool ok = true;
    while (left > 0 && ok) {
      const int a = free[left - 1];
      const auto j = std::min(static_cast<std::size_t>(rng.uniform() * double(left - 1)), left - 2);
      const int b = free[j];
      free[j] = free[left - 2];
      left -= 2;
      mate[a] = b;
      mate[b] = a;
      if (simple) {
        const int u = a / d, v = b / d;
        auto& au = adj[static_cast<std::size_t>(u)];
        ok = u != v && std::find(au.begin(), au.end(), v) == au.end();
        au.push_back(v);
        adj[static_cast<std::size_t>(v)].push_back(u);
      }
    }
    if (ok) return RegularGraph(n, d, mate);
  }
  throw BudgetError("graph: no simple graph within the retry budget");
}

RegularGraph read_graph(std::istream& in) {
  std::string line;
  auto next_line = [&](std::string& out) {
    while (std::getline(in, line)) {
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") != std::string::npos) {
        out = line;
        return true;
      }
    }
    return false;
  };
  std::string header;
  require(next_line(header), "graph file: missing header");
  std::istringstream hs(header);
  int n = 0, d = 0;
  require(static_cast<bool>(hs >> n >> d), "graph file: header must be 'n d'");
  std::vector<std::pair<int, int>> edges;
  std::string row;
  while (next_line(row)) {
    std::istringstream rs(row);
    int u = 0, v = 0;
    require(static_cast<bool>(rs >> u >> v), "graph file: edge line must be 'u v'");
    std::string extra;
    require(!(rs >> extra), "graph file: trailing tokens on edge line");
    edges.emplace_back(u, v);
  }
  return RegularGraph::from_edges(n, d, edges);
}

RegularGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot open graph file " + path);
  return read_graph(in);
}

void write_graph(std::ostream& out, const RegularGraph& graph) {
  out << graph.size() << ' ' << graph.degree() << '\n';
  for (auto [u, v] : graph.edges()) out << u << ' ' << v << '\n';
}

BigInt pm_count(int m) {
  require(m >= 0 && m % 2 == 0, "pm_count: m must be even and nonnegative");
  BigInt r = 1;
  for (int i = m - 1; i > 1; i -= 2) r *= i;
  return r;
}

namespace {

void require_symmetric(const std::vector<std::vector<double>>& nu, std::size_t colors) {
  require(nu.size() == colors, "nu: matrix size differs from color count");
  for (const auto& r : nu) require(r.size() == colors, "nu: matrix is not square");
  for (std::size_t a = 0; a < colors; ++a)
    for (std::size_t b = 0; b < colors; ++b)
      require(std::abs(nu[a][b] - nu[b][a]) <= 1e-12, "nu: must be symmetric");
}

BigInt factorial(int n) {
  BigInt r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// Nearest integer to x when within 1e-9, else -1.
long as_count(double x) {
  const double r = std::round(x);
  return std::abs(x - r) <= 1e-9 && r >= 0 ? static_cast<long>(r) : -1;
}

}  // namespace

BigInt matching_color_count(std::span<const int> colors,
                            const std::vector<std::vector<double>>& nu) {
  const int n = static_cast<int>(colors.size());
  require(n % 2 == 0, "matching_color_count: number of points must be even");
  require(n <= 12, "matching_color_count: brute force is limited to 12 points");
  const int k = colors.empty() ? 0 : *std::max_element(colors.begin(), colors.end()) + 1;
  require(static_cast<int>(nu.size()) >= k, "matching_color_count: nu has too few colors");
  const auto kk = nu.size();
  require_symmetric(nu, kk);
  std::vector<long> target(kk * kk);
  for (std::size_t a = 0; a < kk; ++a)
    for (std::size_t b = 0; b < kk; ++b) {
      target[a * kk + b] = as_count(nu[a][b] * n);
      if (target[a * kk + b] < 0) return 0;
    }

  std::vector<long> directed(kk * kk, 0);
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  BigInt total = 0;
  auto recurse = [&](auto&& self) -> void {
    int first = 0;
    while (first < n && used[first]) ++first;
    if (first == n) {
      if (directed == target) total += 1;
      return;
    }
    used[first] = 1;
    for (int j = first + 1; j < n; ++j) {
      if (used[j]) continue;
      used[j] = 1;
      const auto a = static_cast<std::size_t>(colors[first]), b = static_cast<std::size_t>(colors[j]);
      ++directed[a * kk + b];
      ++directed[b * kk + a];
      self(self);
      --directed[a * kk + b];
      --directed[b * kk + a];
      used[j] = 0;
    }
    used[first] = 0;
  };
  recurse(recurse);
  return total;
}

BigInt vertex_coloring_count(std::span<const int> color_counts) {
  int n = 0;
  for (int c : color_counts) {
    require(c >= 0, "vertex_coloring_count: negative count");
    n += c;
  }
  BigInt r = factorial(n);
  for (int c : color_counts) r /= factorial(c);
  return r;
}

BigInt paired_coloring_count(const std::vector<std::vector<double>>& nu, int n) {
  require(n >= 0 && n % 2 == 0, "paired_coloring_count: n must be even");
  const auto k = nu.size();
  require_symmetric(nu, k);
  // Edges of unordered color type {a,b}: n*nu(a,b) for a != b, n*nu(a,a)/2 for a == b.
  BigInt denom = 1;
  long edges = 0, hetero = 0;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a; b < k; ++b) {
      const long m = as_count(a == b ? nu[a][a] * n / 2.0 : nu[a][b] * n);
      if (m < 0) return 0;
      edges += m;
      if (a != b) hetero += m;
      denom *= factorial(static_cast<int>(m));
    }
  if (edges != n / 2) return 0;
  BigInt r = factorial(n / 2) / denom;
  r <<= static_cast<unsigned>(hetero);
  return r;
}

double girth_profile(const RegularGraph& graph, int L) {
  require(L >= 1, "girth_profile: L must be >= 1");
  const int n = graph.size();
  const int d = graph.degree();
  std::vector<int> dist(static_cast<std::size_t>(n), -1), branch(static_cast<std::size_t>(n)),
      via(static_cast<std::size_t>(n));
  std::vector<int> touched;
  int on_cycle = 0;
  const auto mate = graph.mate();
  for (int v = 0; v < n; ++v) {
    // BFS over slots; branch = first slot out of v on the tree path.
    for (int t : touched) dist[t] = -1;
    touched.assign(1, v);
    dist[v] = 0;
    branch[v] = -1;
    via[v] = -1;
    std::queue<int> q;
    q.push(v);
    int shortest = std::numeric_limits<int>::max();
    while (!q.empty()) {
      const int x = q.front();
      q.pop();
      if (2 * dist[x] + 1 > L) break;
      for (int s = x * d; s < (x + 1) * d; ++s) {
        if (s == via[x]) continue;
        const int ms = mate[s];
        const int y = ms / d;
        if (dist[y] < 0) {
          dist[y] = dist[x] + 1;
          branch[y] = x == v ? s : branch[x];
          via[y] = ms;
          touched.push_back(y);
          q.push(y);
        } else if (ms != via[x] && (branch[x] != branch[y] || x == v || y == v)) {
          shortest = std::min(shortest, dist[x] + dist[y] + 1);
        }
      }
    }
    if (shortest <= L) ++on_cycle;
  }
  return double(on_cycle) / n;
}

KMeans1D kmeans_1d(std::span<const double> values, int m, int restarts, std::uint64_t seed) {
  require(m >= 1, "kmeans: need at least one level");
  require(!values.empty(), "kmeans: no values");
  const std::size_t n = values.size();
  KMeans1D best;
  best.cost = std::numeric_limits<double>::infinity();
  const Stream root(seed);
  for (int rep = 0; rep < std::max(1, restarts); ++rep) {
    Stream rng = root.split(static_cast<std::uint64_t>(rep));
    // k-means++ seeding.
    std::vector<double> centers{values[static_cast<std::size_t>(rng.uniform() * double(n)) % n]};
    std::vector<double> d2(n);
    while (static_cast<int>(centers.size()) < m) {
      for (std::size_t i = 0; i < n; ++i) {
        double best_d = std::numeric_limits<double>::infinity();
        for (double c : centers) best_d = std::min(best_d, (values[i] - c) * (values[i] - c));
        d2[i] = best_d;
      }
      if (std::accumulate(d2.begin(), d2.end(), 0.0) <= 0.0) {
        centers.push_back(centers.back());
        continue;
      }
      centers.push_back(values[static_cast<std::size_t>(rng.categorical(d2))]);
    }
    std::vector<int> assign(n, 0);
    for (int iter = 0; iter < 200; ++iter) {
      bool changed = false;
      for (std::size_t i = 0; i < n; ++i) {
        int arg = 0;
        for (int c = 1; c < m; ++c)
          if (std::abs(values[i] - centers[c]) < std::abs(values[i] - centers[arg])) arg = c;
        changed |= arg != assign[i];
        assign[i] = arg;
      }
      std::vector<double> sum(static_cast<std::size_t>(m), 0.0);
      std::vector<int> cnt(static_cast<std::size_t>(m), 0);
      for (std::size_t i = 0; i < n; ++i) {
        sum[assign[i]] += values[i];
        ++cnt[assign[i]];
      }
      for (int c = 0; c < m; ++c)
        if (cnt[c] > 0) centers[c] = sum[c] / cnt[c];
      if (!changed && iter > 0) break;
    }
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      cost += (values[i] - centers[assign[i]]) * (values[i] - centers[assign[i]]);
    if (cost < best.cost) {
      best.cost = cost;
      best.centers = centers;
      best.assignment = assign;
    }
  }
  return best;
}

EigenReport eigen_experiment(const RegularGraph& graph, int index, int levels, std::uint64_t seed,
                             double tolerance) {
  require(graph.simple() && graph.connected(), "eigen_experiment: graph must be simple and connected");
  const int n = graph.size();
  require(index >= 0 && index < n, "eigen_experiment: eigen index out of range");
  require(levels >= 0, "eigen_experiment: levels must be >= 0 (0 = no quantization)");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int v = 0; v < n; ++v)
    for (int w : graph.neighbors(v)) a(v, w) += 1.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigen_experiment: eigensolver failed");
  const Eigen::Index col = n - 1 - index;

  EigenReport rep;
  rep.index = index;
  rep.levels = levels;
  rep.tolerance = tolerance;
  rep.eigenvalue = solver.eigenvalues()(col);
  Eigen::VectorXd f = solver.eigenvectors().col(col);
  rep.vector.assign(f.data(), f.data() + n);
  if (levels > 0) {
    auto km = kmeans_1d(rep.vector, levels, 50, seed);
    rep.level_values = km.centers;
    for (int v = 0; v < n; ++v) rep.vector[v] = km.centers[km.assignment[v]];
  }
  double scale = 0.0;
  for (double x : rep.vector) scale = std::max(scale, std::abs(x));
  scale *= std::abs(rep.eigenvalue) + graph.degree();
  int bad = 0;
  for (int v = 0; v < n; ++v) {
    double sum = 0.0;
    for (int w : graph.neighbors(v)) sum += rep.vector[w];
    if (std::abs(rep.eigenvalue * rep.vector[v] - sum) > tolerance * std::max(scale, 1e-300)) ++bad;
  }
  rep.error_ratio = double(bad) / n;
  return rep;
}

}  // namespace treelab
