#pragma once

#include <iosfwd>

namespace slepf::cli {

/// Exit codes of run().
enum ExitCode : int { kOk = 0, kVerificationFailed = 1, kUsage = 2 };

/// Parses argv, runs the subcommand and writes its report to `out` (or to the
/// file given by --output). Diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace slepf::cli
