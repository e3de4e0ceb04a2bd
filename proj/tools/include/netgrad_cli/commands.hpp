#pragma once

// Subcommands of the netgrad tool. Each writes its artifacts and a
// manifest.json into `out` and returns the process exit code.

#include <filesystem>
#include <iosfwd>
#include <string>

#include "netgrad_cli/config.hpp"

namespace netgrad::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumerical = 2;

int cmd_run_flow(const RunConfig& c, const std::filesystem::path& out, std::ostream& log);
int cmd_check_gradient(const RunConfig& c, const std::filesystem::path& out, std::ostream& log);
int cmd_second_variation(const RunConfig& c, const std::filesystem::path& out, std::ostream& log);
int cmd_example_1d(const RunConfig& c, const std::filesystem::path& out, std::ostream& log);
int cmd_pnp_dissipation(const RunConfig& c, const std::filesystem::path& out, std::ostream& log);

/// Dispatches by name and maps library errors to exit codes (messages go to `err`).
int run_subcommand(const std::string& name, const RunConfig& c, const std::filesystem::path& out, std::ostream& log,
                   std::ostream& err);

/// "run-flow", "check-gradient", "second-variation", "example-1d", "pnp-dissipation"
const std::vector<std::string>& subcommand_names();

}  // namespace netgrad::cli
