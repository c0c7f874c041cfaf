#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "geoctl/dynamics.hpp"
#include "geoctl/fields.hpp"
#include "geoctl/systems.hpp"

namespace geoctl {

/// Open-loop control system: chart, Jacobi metric at energy E, actuation
/// frame, plus the defining kinetic metric and potential.
struct OpenLoopSystem {
    Chart chart;
    MetricField G_ol;
    ActuationFrame frame;
    double E;
    MetricField M;
    ScalarField V;
};

struct ClosedLoopSystem {
    Chart chart;
    MetricField G_cl;
};

/// Conformal rescaling 2(E - V(q)) M(q). Evaluation throws HillBoundary
/// where E - V(q) < jacobi_epsilon. Analytic derivatives are produced when
/// both M and V provide them.
MetricField jacobi_metric(const MetricField& M, const ScalarField& V, double E);

OpenLoopSystem make_open_loop(const SystemSpec& spec, double E);

/// (Gamma_cl^k_ij - Gamma_ol^k_ij) v^i v^j; tensorial in spite of the
/// individual connections.
Eigen::VectorXd connection_difference(const MetricField& G_cl, const MetricField& G_ol,
                                      const TangentState& s, double fd_step = 0.0);

/// Result of the pointwise matching solve at one state.
struct MatchingReport {
    Eigen::VectorXd u_coeffs;         // m input coefficients in the G_ol coframe
    Eigen::VectorXd residual_vector;  // component of the matching defect off the span
    double residual_norm;             // G_ol norm (Euclidean in the fallback)
    double decomposition_condition;   // condition number of the frame Gram matrix
    Eigen::VectorXd point;
    Eigen::VectorXd velocity;
    bool off_shell = false;            // state energy differs from the declared shell
    bool euclidean_fallback = false;   // G_ol not positive definite at the point
};

/// JSON object with keys u_coeffs, residual_vector, residual_norm,
/// condition, point, velocity (plus the report flags).
std::string matching_report_json(const MatchingReport& report);

/// Solves the pointwise matching problem at s: decomposes the matching
/// defect (Gamma_ol - Gamma_cl)[v,v] into frame and G_ol-orthogonal parts.
/// The coefficients are the feedback that makes the forced G_ol flow follow
/// G_cl geodesics wherever the residual vanishes.
MatchingReport solve_pointwise_matching(const OpenLoopSystem& sys, const MetricField& G_cl,
                                        const TangentState& s, double fd_step = 0.0);

/// Feedback law extracted from a candidate closed-loop metric; coefficients
/// are quadratic in the velocity.
struct ControlLaw {
    ControlLawFn evaluator;
    Eigen::VectorXd operator()(const TangentState& s) const { return evaluator(s); }
};

/// Deterministic state sampler: uniform position grid with seeded jitter,
/// uniform velocity components in [-scale, scale]. States violating the
/// Hill bound of the target system are rejected and redrawn.
struct StateSampler {
    std::vector<std::array<double, 2>> region;  // per-axis position bounds
    int count = 100;
    std::uint64_t seed = 0;
    double velocity_scale = 1.0;
};

std::vector<TangentState> sample_states(const StateSampler& sampler,
                                        const OpenLoopSystem& sys);

struct MatchVerification {
    double max_residual = 0.0;
    TangentState worst;
    bool pass = false;
    int samples = 0;
    double tol = 0.0;
};

MatchVerification verify_matching(const OpenLoopSystem& sys, const MetricField& G_cl,
                                  const std::vector<TangentState>& states, double tol,
                                  double fd_step = 0.0, int threads = 1);
MatchVerification verify_matching(const OpenLoopSystem& sys, const MetricField& G_cl,
                                  const StateSampler& sampler, double tol,
                                  double fd_step = 0.0, int threads = 1);

/// Verifies matching over the sampler region and returns the feedback law;
/// throws MatchingFailed when any sampled residual exceeds match_tol.
ControlLaw extract_control_law(const OpenLoopSystem& sys, const MetricField& G_cl,
                               const StateSampler& sampler, double match_tol,
                               double fd_step = 0.0);

}  // namespace geoctl
