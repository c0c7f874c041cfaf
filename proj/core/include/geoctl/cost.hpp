#pragma once

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <vector>

#include "geoctl/fields.hpp"

namespace geoctl {

struct ScalarInvariants {
    double R;      // scalar curvature g^{jl} R^i_jil
    double riem2;  // full contraction R_ijkl R^ijkl
};

ScalarInvariants scalar_invariants(const MetricField& G, const Eigen::VectorXd& q,
                                   double fd_step = 0.0);

/// Integrand F = constant + scalar R + scalar_sq R^2 + riem_sq Riem^2
/// + track (R - r_target(q))^2. At least one coefficient must be active.
struct CostSpec {
    double constant = 0.0;
    double scalar = 0.0;
    double scalar_sq = 0.0;
    double riem_sq = 0.0;
    double track = 0.0;
    std::function<double(const Eigen::VectorXd&)> r_target;  // required when track != 0

    bool active() const {
        return constant != 0.0 || scalar != 0.0 || scalar_sq != 0.0 || riem_sq != 0.0 ||
               track != 0.0;
    }
    bool needs_curvature() const {
        return scalar != 0.0 || scalar_sq != 0.0 || riem_sq != 0.0 || track != 0.0;
    }
};

struct QuadratureGrid {
    enum class Rule { Midpoint, Trapezoid };
    std::vector<std::array<double, 2>> region;
    std::vector<int> counts;
    Rule rule = Rule::Trapezoid;
};

/// Quadrature of F(q) sqrt(|det G|) over the grid region.
double cost_evaluate(const CostSpec& spec, const MetricField& G, const QuadratureGrid& grid,
                     double fd_step = 0.0);

}  // namespace geoctl
