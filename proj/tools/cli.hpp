#pragma once

#include <iosfwd>

namespace stokes::cli {

// exit codes
inline constexpr int kOk = 0;
inline constexpr int kValidation = 2;
inline constexpr int kConvergence = 3;
inline constexpr int kVerification = 4;

// full command line including argv[0]; results go to --out or to `out`
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace stokes::cli
