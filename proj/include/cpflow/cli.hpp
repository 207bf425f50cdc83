#pragma once

#include <iosfwd>

namespace cpflow
{

inline constexpr const char* kToolVersion = "0.1.0";

/** Exit codes of the command-line tool. */
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 2,
    kExitDomain = 3,
    kExitMaxTime = 4,
    kExitFailed = 5,
};

/**
 * Run one command (curvature, gb, flow, solve, check) with argv-style
 * arguments. Writes a run manifest (default cpflow_manifest.json, or
 * --manifest PATH) for every invocation and returns the exit code.
 */
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cpflow
