#pragma once

#include <iosfwd>

namespace tmf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitMismatch = 2;

/// Entry point for the `tmf` command (subcommands filter, rank, trace, bench).
int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace tmf::cli
