#pragma once

#include <iosfwd>

namespace ftlab::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kNoRoot = 2, kCensusInvalid = 3, kVerifyFailed = 4 };

// Whole command line; output goes to `out` unless --out redirects it.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ftlab::cli
