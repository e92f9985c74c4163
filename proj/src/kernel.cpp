#include "treelab/kernel.hpp"

#include <charconv>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Dense>

#include "treelab/error.hpp"
#include "treelab/glauber.hpp"
#include "treelab/graph.hpp"

namespace treelab {

namespace {

std::string fmt_param(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace

TransitionKernel::TransitionKernel(std::vector<std::vector<double>> rows, std::vector<double> pi,
                                   std::string label)
    : states_(static_cast<int>(rows.size())), pi_(std::move(pi)), label_(std::move(label)) {
  require(states_ > 0, "kernel: no states");
  require(static_cast<int>(pi_.size()) == states_, "kernel: pi length differs from state count");
  q_.reserve(static_cast<std::size_t>(states_ * states_));
  for (const auto& r : rows) {
    require(static_cast<int>(r.size()) == states_, "kernel: matrix is not square");
    double sum = 0.0;
    for (double x : r) {
      require(std::isfinite(x) && x >= 0.0 && x <= 1.0, "kernel: entry outside [0,1]");
      sum += x;
      q_.push_back(x);
    }
    require(std::abs(sum - 1.0) <= kTolerance, "kernel: row does not sum to 1");
  }
  double total = 0.0;
  for (double x : pi_) {
    require(std::isfinite(x) && x > 0.0, "kernel: stationary law must be strictly positive");
    total += x;
  }
  require(std::abs(total - 1.0) <= kTolerance, "kernel: stationary law does not sum to 1");
  for (int s = 0; s < states_; ++s)
    for (int t = s + 1; t < states_; ++t)
      require(std::abs(pi_[s] * (*this)(s, t) - pi_[t] * (*this)(t, s)) <= kTolerance,
              "kernel: detailed balance fails (kernel is not reversible)");
}

TransitionKernel TransitionKernel::from_rows(std::vector<std::vector<double>> rows,
                                             std::string label) {
  const auto k = static_cast<Eigen::Index>(rows.size());
  require(k > 0, "kernel: no states");
  Eigen::MatrixXd a(k, k);
  for (Eigen::Index s = 0; s < k; ++s) {
    require(static_cast<Eigen::Index>(rows[s].size()) == k, "kernel: matrix is not square");
    for (Eigen::Index t = 0; t < k; ++t) a(t, s) = rows[s][t];
  }
  a -= Eigen::MatrixXd::Identity(k, k);
  a.row(k - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
  rhs(k - 1) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  require(lu.isInvertible(), "kernel: stationary law is not unique");
  Eigen::VectorXd x = lu.solve(rhs);
  std::vector<double> pi(x.data(), x.data() + k);
  double total = 0.0;
  for (double& p : pi) {
    if (std::abs(p) < 1e-15) p = 0.0;
    total += p;
  }
  for (double& p : pi) p /= total;
  return TransitionKernel(std::move(rows), std::move(pi), std::move(label));
}

std::vector<std::vector<double>> TransitionKernel::rows() const {
  std::vector<std::vector<double>> out;
  for (int s = 0; s < states_; ++s) out.emplace_back(row(s).begin(), row(s).end());
  return out;
}

TransitionKernel make_ising(double theta) {
  require(std::abs(theta) < 1.0, "ising: |theta| must be < 1");
  const double keep = (1.0 + theta) / 2.0;
  const double flip = (1.0 - theta) / 2.0;
  return TransitionKernel({{keep, flip}, {flip, keep}}, {0.5, 0.5},
                          "ising(" + fmt_param(theta) + ")");
}

TransitionKernel make_potts(int k, double p) {
  require(k >= 2, "potts: k must be >= 2");
  require(p >= 0.0 && p <= 1.0, "potts: p must lie in [0,1]");
  // p is the probability of leaving the current state.
  const double off = p / (k - 1);
  std::vector<std::vector<double>> rows(k, std::vector<double>(k, off));
  for (int s = 0; s < k; ++s) rows[s][s] = 1.0 - p;
  return TransitionKernel(std::move(rows), std::vector<double>(k, 1.0 / k),
                          "potts(" + std::to_string(k) + "," + fmt_param(p) + ")");
}

TransitionKernel make_uniform(int k) {
  require(k >= 1, "uniform: k must be >= 1");
  return TransitionKernel(std::vector<std::vector<double>>(k, std::vector<double>(k, 1.0 / k)),
                          std::vector<double>(k, 1.0 / k), "uniform(" + std::to_string(k) + ")");
}

TransitionKernel make_walk_kernel(const RegularGraph& graph) {
  require(graph.connected(), "walk kernel: graph is disconnected");
  const int n = graph.size();
  const double deg = graph.degree();
  std::vector<std::vector<double>> rows(n, std::vector<double>(n, 0.0));
  for (int v = 0; v < n; ++v)
    for (int w : graph.neighbors(v)) rows[v][w] += 1.0 / deg;
  return TransitionKernel(std::move(rows), std::vector<double>(n, 1.0 / n), "walk");
}

double dobrushin_coefficient(const TransitionKernel& kernel, int d, double budget) {
  require(d >= 1, "dobrushin: d must be >= 1");
  const int k = kernel.states();
  // C(k+d-2, d-1) multisets of shared states, times k^2 state pairs.
  double multisets = 1.0;
  for (int i = 1; i <= d - 1; ++i) multisets = multisets * (k - 1 + i) / i;
  if (multisets * k * k > budget)
    throw BudgetError("dobrushin: enumeration of " + std::to_string(multisets * k * k) +
                      " cases exceeds budget");

  double best = 0.0;
  std::vector<int> shared(static_cast<std::size_t>(d));
  std::vector<Distribution> cond(static_cast<std::size_t>(k));
  std::vector<bool> possible(static_cast<std::size_t>(k));

  auto visit = [&] {
    for (int s = 0; s < k; ++s) {
      shared[static_cast<std::size_t>(d - 1)] = s;
      try {
        cond[s] = conditional_dist(kernel, shared);
        possible[s] = true;
      } catch (const IncompatibleConfiguration&) {
        possible[s] = false;
      }
    }
    for (int s = 0; s < k; ++s)
      for (int t = s + 1; t < k; ++t)
        if (possible[s] && possible[t]) best = std::max(best, total_variation(cond[s], cond[t]));
  };

  // Nondecreasing sequences over the first d-1 slots.
  auto recurse = [&](auto&& self, int pos, int lo) -> void {
    if (pos == d - 1) {
      visit();
      return;
    }
    for (int s = lo; s < k; ++s) {
      shared[static_cast<std::size_t>(pos)] = s;
      self(self, pos + 1, s);
    }
  };
  recurse(recurse, 0, 0);
  return best;
}

double spectral_radius(const TransitionKernel& kernel) {
  const int k = kernel.states();
  if (k == 1) return 0.0;
  Eigen::MatrixXd sym(k, k);
  const auto& pi = kernel.pi();
  for (int s = 0; s < k; ++s)
    for (int t = 0; t < k; ++t) sym(s, t) = std::sqrt(pi[s]) * kernel(s, t) / std::sqrt(pi[t]);
  // Symmetric up to rounding; average to remove the asymmetric residue.
  sym = 0.5 * (sym + sym.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  Eigen::VectorXd ev = solver.eigenvalues();
  Eigen::Index perron = 0;
  (ev.array() - 1.0).abs().minCoeff(&perron);
  double radius = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (i != perron) radius = std::max(radius, std::abs(ev(i)));
  return std::min(radius, 1.0);
}

TransitionKernel read_kernel(std::istream& in, std::string label) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<double> r;
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        r.push_back(std::stod(tok, &used));
        require(used == tok.size(), "kernel file: bad number '" + tok + "'");
      } catch (const std::logic_error&) {
        throw ValidationError("kernel file: bad number '" + tok + "'");
      }
    }
    if (!r.empty()) rows.push_back(std::move(r));
  }
  require(!rows.empty(), "kernel file: no rows");
  return TransitionKernel::from_rows(std::move(rows), std::move(label));
}

TransitionKernel load_kernel(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot open kernel file " + path);
  return read_kernel(in, path);
}

void write_kernel(std::ostream& out, const TransitionKernel& kernel) {
  auto old = out.precision(17);
  for (int s = 0; s < kernel.states(); ++s) {
    for (int t = 0; t < kernel.states(); ++t) out << (t ? " " : "") << kernel(s, t);
    out << '\n';
  }
  out.precision(old);
}

}  // namespace treelab
