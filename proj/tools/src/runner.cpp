#include "sbren_tools/runner.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "sbren/errors.hpp"
#include "sbren_tools/config.hpp"
#include "sbren_tools/experiments.hpp"
#include "sbren_tools/output.hpp"

namespace sbren::tools {

std::filesystem::path resolve_output_dir(const std::optional<std::string>& override_dir,
                                         const std::string& config_dir, const std::string& experiment) {
    if (override_dir && !override_dir->empty()) return *override_dir;
    if (const char* env = std::getenv(output_dir_env); env && *env) return env;
    if (!config_dir.empty()) return config_dir;
    return std::filesystem::path("sbren-out") / experiment;
}

namespace {

std::string file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

int run_config(const std::filesystem::path& config, const RunOptions& options, std::ostream& out, std::ostream& err) {
    PreparedRun prepared;
    try {
        prepared = prepare(read_json_file(config));
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return exit_code::config;
    }
    const auto& common = prepared.common;
    const auto dir = resolve_output_dir(options.output_dir, common.output_dir, common.experiment);
    const ManifestInfo info{common.experiment, common.seed, sha256_hex(file_bytes(config))};
    out << "experiment " << common.experiment << " -> " << dir.string() << "\n";
    try {
        const auto artifacts = prepared.run(out);
        write_artifacts(dir, artifacts, info);
        out << "wrote " << artifacts.size() << " files + manifest.json\n";
        return exit_code::ok;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        const nlohmann::json failure{
            {"experiment", common.experiment}, {"error", e.what()}, {"solve_report", to_json(e.report())}};
        try {
            write_artifacts(dir, {{"failure.json", json_text(failure)}}, info);
        } catch (const std::exception& w) {
            err << "could not write failure.json: " << w.what() << "\n";
        }
        return exit_code::numerical;
    } catch (const SizingError& e) {
        err << "config error: " << e.what() << "\n";
        return exit_code::config;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::internal;
    }
}

int validate_config(const std::filesystem::path& config, std::ostream& out, std::ostream& err) {
    try {
        const auto prepared = prepare(read_json_file(config));
        out << config.string() << ": ok (" << prepared.common.experiment << ")\n";
        return exit_code::ok;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return exit_code::config;
    }
}

void list_experiments(std::ostream& out) {
    std::size_t width = 0;
    for (const auto& e : experiment_index()) width = std::max(width, e.name.size());
    for (const auto& e : experiment_index())
        out << std::left << std::setw(static_cast<int>(width + 2)) << e.name << e.description << "\n";
}

} // namespace sbren::tools
