#pragma once

#include <ostream>

namespace pemda {

/// Runs the command line. Exit codes: 0 success, 1 validation error or bad
/// usage, 2 numerical blow-up.
int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pemda
