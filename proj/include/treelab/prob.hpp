#pragma once

#include <span>
#include <vector>

namespace treelab {

using Distribution = std::vector<double>;

/// Half L1 distance between two probability vectors of equal length.
double total_variation(std::span<const double> p, std::span<const double> q);

/// Throws ValidationError unless entries are nonnegative and sum to 1 within tol.
void validate_distribution(std::span<const double> p, double tol, const char* what);

// Mean and standard error of a sample.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

Estimate mean_and_stderr(std::span<const double> xs);

}  // namespace treelab
