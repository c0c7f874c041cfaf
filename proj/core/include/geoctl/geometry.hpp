#pragma once

#include <Eigen/Dense>

#include <vector>

#include "geoctl/fields.hpp"
#include "geoctl/tensor.hpp"

namespace geoctl {

/// Levi-Civita connection coefficients, gamma(k,i,j) = Gamma^k_ij,
/// symmetric in (i,j) by construction.
struct ConnectionCoefficients {
    Tensor3 gamma;
};

/// Riemann tensor components riem(i,j,k,l) = R^i_jkl, antisymmetric in
/// the last two indices by construction.
struct CurvatureTensor {
    Tensor4 riem;
};

/// Checked metric evaluation: wraps periodic coordinates, enforces the
/// domain, symmetry and non-degeneracy invariants, and returns the
/// symmetrized matrix.
Eigen::MatrixXd metric_eval(const MetricField& metric, const Eigen::VectorXd& q);

/// Index raising, g^{-1} w.
Eigen::VectorXd sharp(const MetricField& metric, const Eigen::VectorXd& q,
                      const Eigen::VectorXd& w);

/// Index lowering, g x.
Eigen::VectorXd flat(const MetricField& metric, const Eigen::VectorXd& q,
                     const Eigen::VectorXd& x);

/// d(k,i,j) = d_k g_ij, analytic when the field provides it, otherwise
/// central differences. fd_step <= 0 selects the default per-axis step
/// defaults::kFdRelative * max(1, |q_k|).
Tensor3 metric_derivative(const MetricField& metric, const Eigen::VectorXd& q,
                          double fd_step = 0.0);

ConnectionCoefficients christoffel(const MetricField& metric, const Eigen::VectorXd& q,
                                   double fd_step = 0.0);

CurvatureTensor riemann(const MetricField& metric, const Eigen::VectorXd& q,
                        double fd_step = 0.0);

/// G-coframe of the actuation frame: m covectors theta^(i) = g e_(i).
std::vector<Eigen::VectorXd> coframe(const MetricField& metric, const ActuationFrame& frame,
                                     const Eigen::VectorXd& q);

/// R_ijkl = g_im R^m_jkl.
Tensor4 lower_riemann(const Eigen::MatrixXd& g, const CurvatureTensor& curv);

/// Sectional curvature of the plane spanned by (u, w).
double sectional_curvature(const MetricField& metric, const Eigen::VectorXd& q,
                           const Eigen::VectorXd& u, const Eigen::VectorXd& w,
                           double fd_step = 0.0);

/// Gradient of a scalar field on the chart, analytic when available.
Eigen::VectorXd scalar_gradient(const Chart& chart, const ScalarField& f,
                                const Eigen::VectorXd& q, double fd_step = 0.0);

/// Step actually used by central differences along the given axis.
double fd_step_for_axis(double fd_step, double coordinate);

}  // namespace geoctl
