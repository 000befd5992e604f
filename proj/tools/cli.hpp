#pragma once

#include <ostream>

namespace susci::cli {

// Exit codes: 0 success, 1 validation or configuration error, 2 usage error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace susci::cli
