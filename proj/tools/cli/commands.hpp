#pragma once

#include <iosfwd>

namespace mano::cli {

/// Exit codes: 0 success, 1 domain error, 2 I/O, parse or usage error.
enum ExitCode : int { kOk = 0, kDomainError = 1, kIoError = 2 };

/// Runs the `mano` command line. Reports go to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mano::cli
