#pragma once

#include <iosfwd>

namespace heapabs {

/// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
/// compare: incomparable; check: embedding rejected.
inline constexpr int kExitNegative = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInput = 3;

/// Runs one command line (argv[0] is the program name).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace heapabs
