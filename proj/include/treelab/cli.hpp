#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace treelab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitBudget = 3;

// Runs one subcommand; args exclude the program name. JSON goes to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace treelab::cli
