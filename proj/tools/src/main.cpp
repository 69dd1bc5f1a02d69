#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sbren_tools/runner.hpp"

int main(int argc, char** argv) {
    using namespace sbren::tools;
    CLI::App app{"sbren: spin-boson renormalization experiments"};
    app.require_subcommand(1);

    std::string config;
    std::optional<std::string> output_dir;
    auto* run = app.add_subcommand("run", "run an experiment config");
    run->add_option("config", config, "config file (JSON)")->required();
    run->add_option("-o,--output-dir", output_dir,
                    std::string("output directory (overrides ") + output_dir_env + " and the config)");

    auto* validate = app.add_subcommand("validate", "check a config without running it");
    validate->add_option("config", config, "config file (JSON)")->required();

    auto* list = app.add_subcommand("list", "list experiment names");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return exit_code::config;
    }

    if (*list) {
        list_experiments(std::cout);
        return exit_code::ok;
    }
    if (*validate) return validate_config(config, std::cout, std::cerr);
    return run_config(config, RunOptions{output_dir}, std::cout, std::cerr);
}
