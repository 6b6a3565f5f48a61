#pragma once

// Command-line front end. `run` is the whole program minus process setup,
// so tests can drive it with in-memory streams.
//
// Exit codes: 0 success, 1 invalid input or usage, 2 a full hand count is
// required (no sample can meet the target).

#include <iosfwd>

namespace rla::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitInfeasible = 2;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rla::cli
