#pragma once

#include <iosfwd>

namespace nsw::cli {

/// Exit codes shared by every subcommand.
enum Exit : int {
  kOk = 0,
  kCheckFailed = 1,
  kParseError = 2,
  kNotMoneyClearing = 3,
  kInvariantBreach = 4,
};

/// Entry point of the `nswmarket` tool. Reports go to `out`, diagnostics to
/// `err`; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nsw::cli
