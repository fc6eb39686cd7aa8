#pragma once

#include <ostream>

namespace steerscan::cli {

/// Process exit codes.
enum ExitCode : int {
    kSuccess = 0,       // steerability certified / command succeeded
    kNotDetected = 1,   // check ran but no direction was certified
    kUsageError = 2,    // bad arguments, unreadable input, no bracket, I/O failure
};

/// Runs the command line in-process. `threads_env` is the value of
/// STEERSCAN_THREADS (nullptr when unset).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
        const char* threads_env = nullptr);

} // namespace steerscan::cli
