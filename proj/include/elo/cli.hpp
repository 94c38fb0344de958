#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace elo::cli {

inline constexpr int kSchemaVersion = 1;

inline constexpr int kExitOk = 0;
inline constexpr int kExitComputation = 1;
inline constexpr int kExitUsage = 2;

/// Parses argv (argv[0] is the program name), runs one subcommand and writes
/// the JSON envelope (or CSV for `scan --format csv`) to `out`. Diagnostics go
/// to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Same, with the arguments after the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace elo::cli
