#pragma once

namespace dnls::cli
{
enum ExitCode : int
{
    Success = 0,
    UsageFailure = 1,
    CheckFailure = 2,
    NotConverged = 3,
};

/// Entry point behind the `dnls` executable. Returns the process exit code.
int run(int argc, const char* const* argv);

} // namespace dnls::cli
