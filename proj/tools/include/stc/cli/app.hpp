#pragma once

#include <ostream>

namespace stc::cli {

/// Full command line entry point. Returns the process exit code.
int run_app(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace stc::cli
