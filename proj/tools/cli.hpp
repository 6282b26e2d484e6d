#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace roughflow::cli {

enum ExitCode : int {
    kOk = 0,
    kNotConverged = 1,   // numerical verdict failed (convergence, bound, monotonicity)
    kInvalidConfig = 2,  // usage or config validation; nothing written
    kGuardViolation = 3, // module precondition or guard tripped during the run
    kRuntimeFailure = 4, // I/O or unexpected error
};

struct Invocation {
    std::string subcommand;
    std::optional<std::filesystem::path> config;
    std::optional<std::filesystem::path> out;
    std::optional<std::uint64_t> seed;
    std::optional<int> grid;
    bool allow_partial = false;
    bool quiet = false;
};

inline constexpr const char* kOutputDirEnv = "ROUGHFLOW_OUTPUT_DIR";

std::vector<std::string> subcommands();

/// Validates, runs and writes artifacts. Messages go to `log` / `err`.
int run(const Invocation& inv, std::ostream& log, std::ostream& err);

/// argv front end (CLI11).
int main_entry(int argc, char** argv);

}  // namespace roughflow::cli
