#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace geoctl::cli {

// Each command validates its config block fully before writing any file,
// then writes outputs atomically into the context's out directory.
// Return values are process exit codes: 0 success/pass, 1 analysis fail.
int cmd_systems(const std::vector<std::string>& args);
int cmd_simulate(const json& config, const RunContext& ctx);
int cmd_jacobi_compare(const json& config, const RunContext& ctx);
int cmd_match(const json& config, const RunContext& ctx);
int cmd_stability(const json& config, const RunContext& ctx);
int cmd_optimize(const json& config, const RunContext& ctx);

}  // namespace geoctl::cli
