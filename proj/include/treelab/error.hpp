#pragma once

#include <stdexcept>
#include <string>

namespace treelab {

// Bad parameters or malformed input. The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An enumeration or memory budget would be exceeded. CLI exit code 3.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Neighbour configuration has probability zero under the branching Markov chain.
class IncompatibleConfiguration : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

}  // namespace treelab
