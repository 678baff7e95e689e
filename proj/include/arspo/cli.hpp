#pragma once

#include <ostream>

namespace arspo {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

inline constexpr int kComparisonSchemaVersion = 1;

/// Entry point of `arspo_lab` (verify | run | compare). Machine-readable output
/// goes to `out`, diagnostics and timings to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace arspo
