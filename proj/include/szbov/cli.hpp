#pragma once

// Batch front end. Exit codes: 0 success, 1 failed check, 2 invalid input,
// 3 no convergence, 4 file I/O.

#include <ostream>

namespace szbov::cli {

enum ExitCode : int { ok = 0, check_failed = 1, invalid = 2, no_convergence = 3, io_failure = 4 };

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace szbov::cli
