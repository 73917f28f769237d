#pragma once

#include "bellgames/harness/run_config.hpp"

namespace bellgames::harness {

/// Validates, routes to the module operation and fills the record.
/// Throws ValidationError for unknown subcommands or bad parameters.
RunRecord dispatch(const RunConfig& config);

/// 0 when every check passed, 2 otherwise. Validation errors map to 1 in the CLI.
int exit_status(const RunRecord& record);

}  // namespace bellgames::harness
