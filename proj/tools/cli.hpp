#pragma once

// Command-line front end. `run` takes the arguments after the program name
// and returns the process exit code:
//   0 success, 1 other failure, 2 validation, 3 solver non-convergence,
//   4 insufficient data, 5 unsupported system.

#include <iosfwd>
#include <string>
#include <vector>

namespace pdmplab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitConvergence = 3;
inline constexpr int kExitInsufficientData = 4;
inline constexpr int kExitUnsupported = 5;

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pdmplab::cli
