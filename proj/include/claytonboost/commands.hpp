#pragma once

#include <iosfwd>

namespace claytonboost {

// Entry point of the command-line tool. Returns the process exit code:
// 0 success, 2 configuration or usage error, 3 data error, 4 numeric error.
int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace claytonboost
