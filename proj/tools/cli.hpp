#pragma once

// Command-line front end. run_cli is the whole program minus process exit,
// so it can be driven in-process.
//
// Exit codes: 0 success, 1 runtime failure, 2 input validation failure.

#include <iosfwd>

namespace heatplan::cli {

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace heatplan::cli
