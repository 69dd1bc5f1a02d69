// runner.hpp - `sbren run` / `sbren validate` without the argument parsing

#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace sbren::tools {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int internal = 1;
inline constexpr int config = 2;
inline constexpr int numerical = 3;
} // namespace exit_code

inline constexpr const char* output_dir_env = "SBREN_OUTPUT_DIR";

/// Output directory precedence: override (--output-dir), then the
/// SBREN_OUTPUT_DIR environment variable, then the config's output_dir,
/// then sbren-out/<experiment>.
std::filesystem::path resolve_output_dir(const std::optional<std::string>& override_dir,
                                         const std::string& config_dir, const std::string& experiment);

struct RunOptions {
    std::optional<std::string> output_dir;
};

/// Runs one config end to end. On a numerical failure writes failure.json
/// (error text and the failing SolveReport) plus the manifest.
int run_config(const std::filesystem::path& config, const RunOptions& options, std::ostream& out, std::ostream& err);

int validate_config(const std::filesystem::path& config, std::ostream& out, std::ostream& err);

void list_experiments(std::ostream& out);

} // namespace sbren::tools
