#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "treelab/error.hpp"
#include "treelab/parallel.hpp"
#include "treelab/prob.hpp"
#include "treelab/rng.hpp"

namespace treelab {

int Stream::categorical(std::span<const double> p) {
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  const double u = uniform() * total;
  double acc = 0.0;
  int last_positive = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    acc += p[i];
    last_positive = static_cast<int>(i);
    if (u < acc) return last_positive;
  }
  return last_positive;
}

int default_workers() {
  if (const char* env = std::getenv("TREELAB_WORKERS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body) {
  const auto threads = static_cast<std::size_t>(std::max(1, workers));
  if (threads == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  const auto used = std::min(threads, count);
  for (std::size_t w = 0; w < used; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += used) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  require(p.size() == q.size(), "total_variation: size mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - q[i]);
  return 0.5 * sum;
}

void validate_distribution(std::span<const double> p, double tol, const char* what) {
  require(!p.empty(), std::string(what) + ": empty distribution");
  double sum = 0.0;
  for (double x : p) {
    require(std::isfinite(x) && x >= 0.0, std::string(what) + ": negative or non-finite entry");
    sum += x;
  }
  require(std::abs(sum - 1.0) <= tol, std::string(what) + ": entries do not sum to 1");
}

Estimate mean_and_stderr(std::span<const double> xs) {
  Estimate e;
  if (xs.empty()) return e;
  const double n = static_cast<double>(xs.size());
  e.value = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() < 2) return e;
  double ss = 0.0;
  for (double x : xs) ss += (x - e.value) * (x - e.value);
  e.std_error = std::sqrt(ss / (n - 1.0) / n);
  return e;
}

}  // namespace treelab
