// experiments.hpp - the named experiments behind `sbren run`

#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "sbren_tools/config.hpp"
#include "sbren_tools/output.hpp"

namespace sbren::tools {

struct ExperimentInfo {
    std::string name;
    std::string description;
};

/// Stable order; `sbren list` prints exactly this.
const std::vector<ExperimentInfo>& experiment_index();

/// Computes the artifacts of one run. Progress and headline numbers go to
/// `log`; nothing touches the filesystem.
using ExperimentRun = std::function<std::vector<Artifact>(std::ostream& log)>;

struct PreparedRun {
    CommonConfig common;
    ExperimentRun run;
};

/// Validates the whole config (unknown keys, ranges, size caps) and binds
/// the experiment. Throws ConfigError; performs no heavy computation.
PreparedRun prepare(const json& config);

} // namespace sbren::tools
