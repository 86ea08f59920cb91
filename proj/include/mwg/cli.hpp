#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mwg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

/// Runs the command line `args` (args[0] is the program name). Subcommands:
/// verify, sample, experiment, plot, spectral.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mwg::cli
