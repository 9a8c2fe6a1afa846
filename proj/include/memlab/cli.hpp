#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace memlab::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_verdict_fail = 1,
    exit_usage = 2,
    exit_runtime = 3,
};

struct RunOptions {
    std::string subcommand;  // solve picard verify compare sweep nonuniq unique converge greens-check
    std::filesystem::path problem;  // empty: built-in defaults
    std::filesystem::path out = "runs";
    std::vector<std::string> overrides;  // section.key=value
    std::uint64_t seed = 0;
    std::string run_name;  // empty: <subcommand>-<UTC timestamp>
};

struct RunOutcome {
    int exit_code = exit_ok;
    std::filesystem::path directory;  // empty if the run never got that far
};

const std::vector<std::string>& subcommands();

/// Runs one subcommand. Every run that gets past option parsing writes
/// report.json and index.json into its run directory, including failed ones.
RunOutcome execute(const RunOptions& options, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches; returns the process exit code.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace memlab::cli
