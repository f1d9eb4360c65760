#pragma once

#include <iosfwd>

namespace divest {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
    kExitOk = 0,
    kExitValidationFailure = 1,
    kExitConfigError = 2,
    kExitNumericFailure = 3,
};

/// Entry point for `divest estimate | sweep | ci | validate-kernel`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace divest
