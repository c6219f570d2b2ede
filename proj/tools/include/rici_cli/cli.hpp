#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace rici::cli {

/// Exit codes: 0 success, 1 usage error, 2 data error.
enum ExitCode : int { kSuccess = 0, kUsageError = 1, kDataError = 2 };

struct CommandResult {
    int exit_code{kSuccess};
    std::vector<std::filesystem::path> outputs;
    std::vector<std::string> diagnostics;
};

/// Environment variable naming the default dataset directory.
inline constexpr const char* kDatasetEnv = "RICI_DATASET";

/// Parses and runs one command line. `args` excludes the program name.
/// Results go to `out`, diagnostics to `err`.
CommandResult run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rici::cli
