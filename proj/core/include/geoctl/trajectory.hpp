#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <vector>

#include "geoctl/fields.hpp"

namespace geoctl {

enum class ParameterKind { Time, ArcLength, UnitInterval };

/// Ordered samples (tau, state) with strictly increasing parameter.
struct Trajectory {
    ParameterKind parameter_kind = ParameterKind::Time;
    std::vector<double> tau;
    std::vector<TangentState> states;

    std::size_t size() const { return tau.size(); }
    const TangentState& front() const { return states.front(); }
    const TangentState& back() const { return states.back(); }

    /// Appends a sample, enforcing strictly increasing tau.
    void append(double t, TangentState s);
};

struct IntegratorConfig {
    enum class Scheme { Rk4, AdaptiveRk45 };
    Scheme scheme = Scheme::Rk4;
    double step = 1e-3;        // fixed step for Rk4
    double tolerance = 1e-10;  // error tolerance for AdaptiveRk45
    long max_steps = 10'000'000;
};

/// CSV with header tau,q1..qn,v1..vn, 17 significant digits, LF endings.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
std::string trajectory_csv(const Trajectory& traj);

/// Formats a double with 17 significant digits (%.17g).
std::string format_g17(double x);

}  // namespace geoctl
