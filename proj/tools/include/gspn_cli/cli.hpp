#pragma once

// Batch front end. Every command writes its CSV files plus manifest.json
// into the --out directory and a short human summary to `out`.
//
// Exit codes: 0 ok, 1 usage or parse error, 2 simulation error,
// 3 optimizer error.

#include <ostream>
#include <string>
#include <vector>

namespace gspn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitSimulation = 2;
inline constexpr int kExitOptimizer = 3;

// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gspn::cli
