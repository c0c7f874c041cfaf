#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <geoctl/cost.hpp>
#include <geoctl/shaping.hpp>
#include <geoctl/stability.hpp>
#include <geoctl/systems.hpp>
#include <geoctl/trajectory.hpp>

namespace geoctl::cli {

using json = nlohmann::ordered_json;

/// Config or usage problem; mapped to exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Execution context from global flags and environment.
struct RunContext {
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_from_flag = false;
    int threads = 1;
};

json load_config_file(const std::string& path);

// Validation helpers; every object is checked against an explicit key set
// and unknown keys are rejected.
void check_keys(const json& j, const std::string& context,
                const std::vector<std::string>& required,
                const std::vector<std::string>& optional);
double as_number(const json& j, const std::string& context);
int as_int(const json& j, const std::string& context);
std::string as_string(const json& j, const std::string& context);
std::vector<double> as_number_list(const json& j, const std::string& context);

/// "system": catalog name or {"name":.., "params":{..}}.
SystemSpec parse_system(const json& j);
json echo_system(const SystemSpec& spec);

IntegratorConfig parse_integrator(const json& j);
json echo_integrator(const IntegratorConfig& cfg);

TangentState parse_state(const json& j, const std::string& context);
json echo_state(const TangentState& s);

std::vector<std::array<double, 2>> parse_region(const json& j, const std::string& context);
json echo_region(const std::vector<std::array<double, 2>>& region);

StateSampler parse_sampler(const json& j, std::uint64_t seed);
json echo_sampler(const StateSampler& sampler);

QuadratureGrid parse_quadrature_grid(const json& j);
json echo_quadrature_grid(const QuadratureGrid& grid);

RegionGrid parse_region_grid(const json& j);
json echo_region_grid(const RegionGrid& grid);

/// Output-file overrides: validated against the command's logical names.
std::map<std::string, std::string> parse_output(const json& j,
                                                const std::vector<std::string>& names,
                                                const std::map<std::string, std::string>& defaults);

double get_number_or(const json& j, const std::string& key, double fallback);
int get_int_or(const json& j, const std::string& key, int fallback);

}  // namespace geoctl::cli
