#pragma once

#include <iosfwd>

namespace agielo {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitDomain = 3,
};

/// Entry point for the `agielo` tool. Normal output goes to `out`; failures
/// write one `agielo: error[<code>]: <message>` line to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace agielo
