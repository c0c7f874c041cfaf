#pragma once

#include <Eigen/Dense>

#include <functional>

#include "geoctl/fields.hpp"
#include "geoctl/trajectory.hpp"

namespace geoctl {

/// Feedback law: m input coefficients as a function of the state.
using ControlLawFn = std::function<Eigen::VectorXd(const TangentState&)>;

/// Integrates the controlled Euler-Lagrange equations of the natural system
/// (M, V): qdd^k = -Gamma^k_ij(M) v^i v^j - (M^-1 grad V)^k + (M# u_force)^k
/// with u_force = sum_i u_i M_flat[e_(i)]. Pass frame = nullptr (or u = {})
/// for the unforced flow.
Trajectory integrate_euler_lagrange(const MetricField& M, const ScalarField& V,
                                    const ActuationFrame* frame, const ControlLawFn& u,
                                    const TangentState& s0, double t0, double t1,
                                    const IntegratorConfig& cfg, double fd_step = 0.0);

/// Integrates the (optionally forced) geodesic flow of G:
/// qdd^k + Gamma^k_ij(G) v^i v^j = (G# [sum_i u_i theta^(i)])^k with
/// theta^(i) = G_flat[e_(i)].
Trajectory integrate_geodesic(const MetricField& G, const ActuationFrame* frame,
                              const ControlLawFn& u, const TangentState& s0, double t0,
                              double t1, const IntegratorConfig& cfg, double fd_step = 0.0);

/// Total energy (1/2) M(v,v) + V(q).
double energy(const MetricField& M, const ScalarField& V, const TangentState& s);

/// Trapezoidal quadrature of the Lagrangian T - V along the trajectory.
double action_evaluate(const MetricField& M, const ScalarField& V, const Trajectory& traj);

/// Euler-Lagrange residual in covector form:
/// M a + Gamma-terms + grad V - u_force. Zero exactly on EL solutions.
Eigen::VectorXd el_residual(const MetricField& M, const ScalarField& V,
                            const Eigen::VectorXd& q, const Eigen::VectorXd& v,
                            const Eigen::VectorXd& a, const Eigen::VectorXd& u_force,
                            double fd_step = 0.0);

/// Reparametrizes a trajectory by G-arclength: ds = sqrt(G(v,v)) dtau,
/// velocities rescaled to unit G-norm. Throws ZeroSpeed below threshold.
Trajectory reparametrize_by_arclength(const MetricField& G, const Trajectory& traj);

/// Symmetric discrete Hausdorff distance between the sample point sets of
/// two trajectories, with periodic coordinates compared modulo period.
double path_distance(const Trajectory& a, const Trajectory& b, const Chart& chart);

/// Euclidean variant for charts without periodic coordinates.
double path_distance(const Trajectory& a, const Trajectory& b);

}  // namespace geoctl
