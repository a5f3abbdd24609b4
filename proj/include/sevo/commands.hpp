#pragma once

#include <string>

#include "sevo/config.hpp"

namespace sevo {

/// Outcome of one CLI command. exit_code 0 iff everything requested
/// completed without solver failure or aborted paths; otherwise the
/// error class names the failure kind (ConfigError, SolverFailure,
/// CouplingViolated, IoError, InternalError).
struct CommandResult {
    int exit_code = 0;
    std::string error_class;
    std::string message;
};

/// Resolved output directory: OUT_DIR env var wins over config.
std::string resolve_out_dir(const RunConfig& config);

CommandResult cmd_simulate(const RunConfig& config);
CommandResult cmd_check_conditions(const RunConfig& config);
CommandResult cmd_stability_scan(const RunConfig& config);
CommandResult cmd_converge(const RunConfig& config);

}  // namespace sevo
