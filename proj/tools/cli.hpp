#pragma once

#include <iosfwd>

namespace selfcal::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsage = 1,
  kValidation = 2,
  kAcceptanceFailure = 3,
};

/// Entry point shared by the `selfcal` binary and the CLI tests. Results go to `out`
/// unless an output path is given; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace selfcal::cli
