#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

#include "geoctl/fields.hpp"
#include "geoctl/trajectory.hpp"

namespace geoctl {

/// The linear operator of the geodesic deviation equation at a state:
/// A^i_j = R^i_kjl v^k v^l. Annihilates the generating velocity.
struct TidalOperator {
    Eigen::MatrixXd matrix;
};

TidalOperator tidal_operator(const MetricField& G, const TangentState& s,
                             double fd_step = 0.0);

/// Eigenvalues of the tidal operator, real parts sorted ascending.
/// Negative values mark exponentially diverging deviation directions,
/// positive values oscillatory ones.
Eigen::VectorXd stability_eigenvalues(const MetricField& G, const TangentState& s,
                                      double fd_step = 0.0);

/// Spectrum restricted to the G-orthogonal complement of the velocity,
/// dropping the structural zero mode along v. Requires G positive definite
/// at the point; n-1 values, ascending.
Eigen::VectorXd transverse_eigenvalues(const MetricField& G, const TangentState& s,
                                       double fd_step = 0.0);

/// Jointly integrated geodesic and deviation data. Jdot holds the covariant
/// rate DJ/dtau.
struct DeviationTrajectory {
    std::vector<double> tau;
    std::vector<TangentState> states;
    std::vector<Eigen::VectorXd> J;
    std::vector<Eigen::VectorXd> Jdot;
};

DeviationTrajectory integrate_deviation(const MetricField& G, const TangentState& s0,
                                        const Eigen::VectorXd& J0,
                                        const Eigen::VectorXd& Jdot0, double t0, double t1,
                                        const IntegratorConfig& cfg, double fd_step = 0.0);

enum class StabilityClass { Stable, Unstable, Excluded };

struct StabilityMapEntry {
    Eigen::VectorXd q;
    double min_eig;  // NaN for excluded points
    StabilityClass cls;
};

struct StabilityMap {
    std::vector<StabilityMapEntry> entries;
    double min_eig_global;      // over classified points
    double unstable_fraction;   // unstable / classified
    int excluded = 0;
};

struct RegionGrid {
    std::vector<std::array<double, 2>> region;
    std::vector<int> counts;
};

/// Classifies each grid point by the minimum transverse tidal eigenvalue
/// over a deterministic set of unit-G-norm velocity directions (16 angles
/// in 2D, 64 Fibonacci-sphere points in 3D, axis pairs above). Points where
/// the metric fails to evaluate are Excluded.
StabilityMap classify_region(const MetricField& G, const RegionGrid& grid,
                             int velocity_samples = 0, double fd_step = 0.0,
                             int threads = 1);

/// CSV q1..qn,min_eig,class with 17 significant digits.
std::string stability_map_csv(const StabilityMap& map, const Chart& chart);

/// JSON {unstable_fraction, min_eig_global, ...}.
std::string stability_summary_json(const StabilityMap& map);

}  // namespace geoctl
