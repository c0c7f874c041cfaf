#pragma once

#include <map>
#include <string>
#include <vector>

#include "geoctl/fields.hpp"

namespace geoctl {

/// Provenance tag for catalog reference values.
enum class RefTag { Trivial, Derived };

struct ReferenceValue {
    double value;
    RefTag tag;
};

/// A canonical test system: chart, kinetic metric with analytic
/// derivatives, potential, actuation frame, parameters, and known
/// reference quantities.
struct SystemSpec {
    std::string name;
    Chart chart;
    MetricField M;
    ScalarField V;
    ActuationFrame frame;
    std::map<std::string, double> params;
    std::map<std::string, ReferenceValue> reference_data;
};

/// Catalog lookup; throws UnknownSystem for unlisted names. Parameter
/// overrides are validated against the system's parameter set.
SystemSpec get_system(const std::string& name);
SystemSpec get_system(const std::string& name,
                      const std::map<std::string, double>& overrides);

std::vector<std::string> list_systems();

}  // namespace geoctl
