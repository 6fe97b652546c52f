#pragma once

// Subcommand bodies behind the sar_quad binary. Each returns a process exit
// code and reports problems on `err`.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace sarquad {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,  ///< usage or I/O problems
    kExitConfigError = 2,
    kExitDiverged = 3,
};

struct CommandOptions {
    std::filesystem::path config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> out_dir;
};

/// --out if given, else $SAR_QUAD_OUT/<config stem>, else ./sar_quad_out/<config stem>.
std::filesystem::path resolve_output_dir(const CommandOptions& options);

int cmd_simulate(const CommandOptions& options, std::ostream& out, std::ostream& err);

/// Per-profile runs under <out>/<profile>/ plus <out>/comparison.csv.
int cmd_compare(const CommandOptions& options, const std::vector<std::string>& profiles,
                std::ostream& out, std::ostream& err);

/// One run per value under <out>/<param>=<value>/ plus <out>/summary.csv.
int cmd_sweep(const CommandOptions& options, const std::string& param,
              const std::vector<std::string>& values, std::ostream& out, std::ostream& err);

}  // namespace sarquad
