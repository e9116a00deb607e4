#pragma once

#include <iosfwd>

namespace basinlab::cli {

/// Exit statuses shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitNotConverged = 1, kExitConfig = 2 };

/// Entry point of the basinlab command line.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace basinlab::cli
