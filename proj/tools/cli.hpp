#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace symlift::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitParse = 2;
inline constexpr int kExitInvariant = 3;
inline constexpr int kExitCap = 4;

/// Runs the command line `args` (without the program name). Output that is
/// not redirected to a file goes to `out`; diagnostics go to `err`.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace symlift::cli
