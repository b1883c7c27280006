#pragma once

#include <iosfwd>

namespace cds::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitUsage = 2;

/// Entry point shared by the executable and the tests. CSV goes to --out
/// when given, otherwise to `out`; diagnostics go to `err`.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cds::cli
