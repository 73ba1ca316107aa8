#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stokeslab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;

/// Runs one command line (without the program name). CSV goes to `out` unless
/// --out is given; diagnostics and summaries go to `err`.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace stokeslab::cli
