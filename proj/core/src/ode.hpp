#pragma once

// Fixed-step RK4 and adaptive Dormand-Prince 5(4) on flat state vectors.
// Internal to the core library; the public surface is the integrate_*
// functions in dynamics.hpp and stability.hpp.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>

#include "geoctl/errors.hpp"
#include "geoctl/trajectory.hpp"

namespace geoctl::detail {

using OdeRhs = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;
// Called after the initial state and every accepted step; may normalize the
// state in place (periodic wrapping).
using OdeRecord = std::function<void(double, Eigen::VectorXd&)>;

inline void rk4_step(const OdeRhs& rhs, double t, double h, Eigen::VectorXd& y) {
    const Eigen::VectorXd k1 = rhs(t, y);
    const Eigen::VectorXd k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1);
    const Eigen::VectorXd k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2);
    const Eigen::VectorXd k4 = rhs(t + h, y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline void integrate_fixed_rk4(const OdeRhs& rhs, double t0, double t1,
                                Eigen::VectorXd y, const IntegratorConfig& cfg,
                                const OdeRecord& record) {
    if (!(t1 > t0)) throw Error("integration interval must have t1 > t0");
    if (!(cfg.step > 0.0)) throw Error("rk4 step must be positive");
    const double span = t1 - t0;
    const long nsteps = static_cast<long>(std::ceil(span / cfg.step - 1e-12));
    if (nsteps > cfg.max_steps)
        throw StepFailure("rk4 would need " + std::to_string(nsteps) +
                          " steps, above max_steps");
    record(t0, y);
    double t = t0;
    for (long k = 0; k < nsteps; ++k) {
        const double target = (k + 1 == nsteps) ? t1 : t0 + (k + 1) * cfg.step;
        rk4_step(rhs, t, target - t, y);
        t = target;
        record(t, y);
    }
}

// Dormand-Prince 5(4) pair with a standard PI-free controller.
inline void integrate_adaptive_rk45(const OdeRhs& rhs, double t0, double t1,
                                    Eigen::VectorXd y, const IntegratorConfig& cfg,
                                    const OdeRecord& record) {
    if (!(t1 > t0)) throw Error("integration interval must have t1 > t0");
    if (!(cfg.tolerance > 0.0)) throw Error("rk45 tolerance must be positive");

    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                        e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;

    const double tol = cfg.tolerance;
    const double hmin = 1e-14 * (t1 - t0);
    double t = t0;
    double h = std::min(t1 - t0, std::max(hmin, 1e-2 * (t1 - t0)));
    long steps = 0;

    record(t0, y);
    while (t < t1) {
        if (steps++ > cfg.max_steps) throw StepFailure("rk45 step budget exhausted");
        h = std::min(h, t1 - t);
        if (h < hmin) throw StepFailure("rk45 step underflow at t = " + std::to_string(t));

        const Eigen::VectorXd k1 = rhs(t, y);
        const Eigen::VectorXd k2 = rhs(t + c2 * h, y + h * (a21 * k1));
        const Eigen::VectorXd k3 = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
        const Eigen::VectorXd k4 = rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        const Eigen::VectorXd k5 =
            rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const Eigen::VectorXd k6 =
            rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const Eigen::VectorXd y5 =
            y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const Eigen::VectorXd k7 = rhs(t + h, y5);
        const Eigen::VectorXd y4 =
            y + h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double err = 0.0;
        for (int i = 0; i < y.size(); ++i) {
            const double scale = tol + tol * std::max(std::abs(y[i]), std::abs(y5[i]));
            const double d = (y5[i] - y4[i]) / scale;
            err += d * d;
        }
        err = std::sqrt(err / static_cast<double>(y.size()));

        if (err <= 1.0) {
            t += h;
            y = y5;
            record(t, y);
        }
        const double factor =
            (err <= 1e-30) ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        h *= factor;
    }
}

inline void integrate_ode(const OdeRhs& rhs, double t0, double t1,
                          const Eigen::VectorXd& y0, const IntegratorConfig& cfg,
                          const OdeRecord& record) {
    if (cfg.scheme == IntegratorConfig::Scheme::Rk4)
        integrate_fixed_rk4(rhs, t0, t1, y0, cfg, record);
    else
        integrate_adaptive_rk45(rhs, t0, t1, y0, cfg, record);
}

}  // namespace geoctl::detail
