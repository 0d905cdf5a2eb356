#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cxgrid::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

/// Runs one command line (args excludes the program name). Results go to
/// --out when given, else to out; diagnostics go to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cxgrid::cli
