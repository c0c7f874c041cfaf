#include "config.hpp"

#include <algorithm>
#include <fstream>

#include <geoctl/errors.hpp>

namespace geoctl::cli {

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("config parse error in '" + path + "': " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    return j;
}

void check_keys(const json& j, const std::string& context,
                const std::vector<std::string>& required,
                const std::vector<std::string>& optional) {
    if (!j.is_object()) throw ConfigError(context + " must be a JSON object");
    for (const auto& key : required)
        if (!j.contains(key)) throw ConfigError(context + " is missing key '" + key + "'");
    for (const auto& [key, _] : j.items()) {
        if (std::find(required.begin(), required.end(), key) == required.end() &&
            std::find(optional.begin(), optional.end(), key) == optional.end())
            throw ConfigError(context + " has unknown key '" + key + "'");
    }
}

double as_number(const json& j, const std::string& context) {
    if (!j.is_number()) throw ConfigError(context + " must be a number");
    return j.get<double>();
}

int as_int(const json& j, const std::string& context) {
    if (!j.is_number_integer()) throw ConfigError(context + " must be an integer");
    return j.get<int>();
}

std::string as_string(const json& j, const std::string& context) {
    if (!j.is_string()) throw ConfigError(context + " must be a string");
    return j.get<std::string>();
}

std::vector<double> as_number_list(const json& j, const std::string& context) {
    if (!j.is_array()) throw ConfigError(context + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& x : j) out.push_back(as_number(x, context + " entry"));
    return out;
}

SystemSpec parse_system(const json& j) {
    try {
        if (j.is_string()) return get_system(j.get<std::string>());
        check_keys(j, "system", {"name"}, {"params"});
        const std::string name = as_string(j.at("name"), "system.name");
        std::map<std::string, double> overrides;
        if (j.contains("params")) {
            if (!j.at("params").is_object())
                throw ConfigError("system.params must be an object");
            for (const auto& [key, value] : j.at("params").items())
                overrides[key] = as_number(value, "system.params." + key);
        }
        return get_system(name, overrides);
    } catch (const UnknownSystem& e) {
        throw ConfigError(e.what());
    }
}

json echo_system(const SystemSpec& spec) {
    json j;
    j["name"] = spec.name;
    json params = json::object();
    for (const auto& [key, value] : spec.params) params[key] = value;
    j["params"] = params;
    return j;
}

IntegratorConfig parse_integrator(const json& j) {
    IntegratorConfig cfg;
    if (j.is_null()) return cfg;
    check_keys(j, "integrator", {"scheme"}, {"step", "tolerance", "max_steps"});
    const std::string scheme = as_string(j.at("scheme"), "integrator.scheme");
    if (scheme == "rk4") {
        if (j.contains("tolerance"))
            throw ConfigError("integrator.tolerance applies to the rk45 scheme only");
        cfg.scheme = IntegratorConfig::Scheme::Rk4;
        cfg.step = get_number_or(j, "step", cfg.step);
        if (!(cfg.step > 0.0)) throw ConfigError("integrator.step must be positive");
    } else if (scheme == "rk45") {
        if (j.contains("step"))
            throw ConfigError("integrator.step applies to the rk4 scheme only");
        cfg.scheme = IntegratorConfig::Scheme::AdaptiveRk45;
        cfg.tolerance = get_number_or(j, "tolerance", cfg.tolerance);
        if (!(cfg.tolerance > 0.0)) throw ConfigError("integrator.tolerance must be positive");
    } else {
        throw ConfigError("integrator.scheme must be 'rk4' or 'rk45'");
    }
    cfg.max_steps = get_int_or(j, "max_steps", static_cast<int>(std::min<long>(
                                                   cfg.max_steps, 2000000000L)));
    if (cfg.max_steps < 1) throw ConfigError("integrator.max_steps must be at least 1");
    return cfg;
}

json echo_integrator(const IntegratorConfig& cfg) {
    json j;
    if (cfg.scheme == IntegratorConfig::Scheme::Rk4) {
        j["scheme"] = "rk4";
        j["step"] = cfg.step;
    } else {
        j["scheme"] = "rk45";
        j["tolerance"] = cfg.tolerance;
    }
    j["max_steps"] = cfg.max_steps;
    return j;
}

TangentState parse_state(const json& j, const std::string& context) {
    check_keys(j, context, {"q", "v"}, {});
    const std::vector<double> q = as_number_list(j.at("q"), context + ".q");
    const std::vector<double> v = as_number_list(j.at("v"), context + ".v");
    if (q.size() != v.size()) throw ConfigError(context + ": q and v sizes differ");
    TangentState s;
    s.q = Eigen::Map<const Eigen::VectorXd>(q.data(), static_cast<long>(q.size()));
    s.v = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<long>(v.size()));
    return s;
}

json echo_state(const TangentState& s) {
    json j;
    j["q"] = std::vector<double>(s.q.begin(), s.q.end());
    j["v"] = std::vector<double>(s.v.begin(), s.v.end());
    return j;
}

std::vector<std::array<double, 2>> parse_region(const json& j, const std::string& context) {
    if (!j.is_array()) throw ConfigError(context + " must be an array of [lo, hi] pairs");
    std::vector<std::array<double, 2>> region;
    for (const auto& pair : j) {
        const std::vector<double> bounds = as_number_list(pair, context + " entry");
        if (bounds.size() != 2 || !(bounds[0] < bounds[1]))
            throw ConfigError(context + " entries must be [lo, hi] with lo < hi");
        region.push_back({bounds[0], bounds[1]});
    }
    if (region.empty()) throw ConfigError(context + " must not be empty");
    return region;
}

json echo_region(const std::vector<std::array<double, 2>>& region) {
    json j = json::array();
    for (const auto& [lo, hi] : region) j.push_back(json::array({lo, hi}));
    return j;
}

StateSampler parse_sampler(const json& j, std::uint64_t seed) {
    check_keys(j, "sampler", {"region"}, {"count", "velocity_scale"});
    StateSampler sampler;
    sampler.region = parse_region(j.at("region"), "sampler.region");
    sampler.count = get_int_or(j, "count", 100);
    if (sampler.count < 1) throw ConfigError("sampler.count must be positive");
    sampler.velocity_scale = get_number_or(j, "velocity_scale", 1.0);
    if (!(sampler.velocity_scale > 0.0))
        throw ConfigError("sampler.velocity_scale must be positive");
    sampler.seed = seed;
    return sampler;
}

json echo_sampler(const StateSampler& sampler) {
    json j;
    j["region"] = echo_region(sampler.region);
    j["count"] = sampler.count;
    j["velocity_scale"] = sampler.velocity_scale;
    return j;
}

namespace {

std::vector<int> parse_counts(const json& j, const std::string& context) {
    if (!j.is_array()) throw ConfigError(context + " must be an array of integers");
    std::vector<int> counts;
    for (const auto& x : j) {
        counts.push_back(as_int(x, context + " entry"));
        if (counts.back() < 1) throw ConfigError(context + " entries must be positive");
    }
    return counts;
}

}  // namespace

QuadratureGrid parse_quadrature_grid(const json& j) {
    check_keys(j, "grid", {"region", "counts"}, {"rule"});
    QuadratureGrid grid;
    grid.region = parse_region(j.at("region"), "grid.region");
    grid.counts = parse_counts(j.at("counts"), "grid.counts");
    if (grid.counts.size() != grid.region.size())
        throw ConfigError("grid.counts and grid.region sizes differ");
    const std::string rule =
        j.contains("rule") ? as_string(j.at("rule"), "grid.rule") : "trapezoid";
    if (rule == "trapezoid")
        grid.rule = QuadratureGrid::Rule::Trapezoid;
    else if (rule == "midpoint")
        grid.rule = QuadratureGrid::Rule::Midpoint;
    else
        throw ConfigError("grid.rule must be 'trapezoid' or 'midpoint'");
    return grid;
}

json echo_quadrature_grid(const QuadratureGrid& grid) {
    json j;
    j["region"] = echo_region(grid.region);
    j["counts"] = grid.counts;
    j["rule"] = grid.rule == QuadratureGrid::Rule::Trapezoid ? "trapezoid" : "midpoint";
    return j;
}

RegionGrid parse_region_grid(const json& j) {
    check_keys(j, "grid", {"region", "counts"}, {});
    RegionGrid grid;
    grid.region = parse_region(j.at("region"), "grid.region");
    grid.counts = parse_counts(j.at("counts"), "grid.counts");
    if (grid.counts.size() != grid.region.size())
        throw ConfigError("grid.counts and grid.region sizes differ");
    return grid;
}

json echo_region_grid(const RegionGrid& grid) {
    json j;
    j["region"] = echo_region(grid.region);
    j["counts"] = grid.counts;
    return j;
}

std::map<std::string, std::string> parse_output(
    const json& j, const std::vector<std::string>& names,
    const std::map<std::string, std::string>& defaults) {
    std::map<std::string, std::string> out = defaults;
    if (j.is_null()) return out;
    check_keys(j, "output", {}, names);
    for (const auto& [key, value] : j.items()) {
        const std::string name = as_string(value, "output." + key);
        if (name.empty() || name.find('/') != std::string::npos ||
            name.find('\\') != std::string::npos)
            throw ConfigError("output." + key + " must be a bare file name");
        out[key] = name;
    }
    return out;
}

double get_number_or(const json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    return as_number(j.at(key), key);
}

int get_int_or(const json& j, const std::string& key, int fallback) {
    if (!j.contains(key)) return fallback;
    return as_int(j.at(key), key);
}

}  // namespace geoctl::cli
