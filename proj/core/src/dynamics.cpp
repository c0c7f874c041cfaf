#include "geoctl/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "geoctl/defaults.hpp"
#include "geoctl/errors.hpp"
#include "geoctl/geometry.hpp"
#include "ode.hpp"

namespace geoctl {

namespace {

Eigen::VectorXd christoffel_quadratic(const ConnectionCoefficients& conn,
                                      const Eigen::VectorXd& v) {
    const int n = static_cast<int>(v.size());
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < n; ++k) {
        double sum = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) sum += conn.gamma(k, i, j) * v[i] * v[j];
        out[k] = sum;
    }
    return out;
}

// Shared second-order integration driver. accel(q, v) returns qdd; the
// state vector is [q; v]. Periodic coordinates are wrapped after every
// accepted step and a DomainExit is raised when the chart is left.
Trajectory integrate_second_order(
    const Chart& chart,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>& accel,
    const TangentState& s0, double t0, double t1, const IntegratorConfig& cfg) {
    const int n = chart.dim();
    if (s0.q.size() != n || s0.v.size() != n)
        throw DomainError("initial state dimension does not match chart");
    if (!chart.contains(s0.q)) throw DomainError("initial state outside chart");

    detail::OdeRhs rhs = [&](double, const Eigen::VectorXd& y) {
        const Eigen::VectorXd q = y.head(n);
        const Eigen::VectorXd v = y.tail(n);
        Eigen::VectorXd dy(2 * n);
        dy.head(n) = v;
        dy.tail(n) = accel(q, v);
        return dy;
    };

    Trajectory traj;
    traj.parameter_kind = ParameterKind::Time;
    detail::OdeRecord record = [&](double t, Eigen::VectorXd& y) {
        Eigen::VectorXd q = y.head(n);
        if (!chart.contains(q))
            throw DomainExit("trajectory left chart at t = " + std::to_string(t));
        q = chart.wrap(q);
        y.head(n) = q;
        traj.append(t, TangentState{q, y.tail(n)});
    };

    Eigen::VectorXd y0(2 * n);
    y0.head(n) = s0.q;
    y0.tail(n) = s0.v;
    try {
        detail::integrate_ode(rhs, t0, t1, y0, cfg, record);
    } catch (const DomainError& e) {
        // A stage evaluation probed beyond the chart: the trajectory is
        // leaving the domain.
        throw DomainExit(std::string("trajectory left chart: ") + e.what());
    }
    return traj;
}

}  // namespace

Trajectory integrate_euler_lagrange(const MetricField& M, const ScalarField& V,
                                    const ActuationFrame* frame, const ControlLawFn& u,
                                    const TangentState& s0, double t0, double t1,
                                    const IntegratorConfig& cfg, double fd_step) {
    const Chart& chart = M.chart();
    auto accel = [&M, &V, frame, &u, &chart, fd_step](const Eigen::VectorXd& q,
                                                      const Eigen::VectorXd& v) {
        const ConnectionCoefficients conn = christoffel(M, q, fd_step);
        const Eigen::VectorXd grad = scalar_gradient(chart, V, q, fd_step);
        const Eigen::MatrixXd g = metric_eval(M, q);
        const auto lu = g.partialPivLu();

        Eigen::VectorXd a = -christoffel_quadratic(conn, v) - lu.solve(grad);
        if (frame && u) {
            const Eigen::VectorXd coeffs = u(TangentState{q, v});
            const Eigen::MatrixXd e = frame->evaluate(chart.wrap(q));
            if (coeffs.size() != e.cols())
                throw Error("control law returned wrong number of coefficients");
            // u_force = sum_i u_i M_flat[e_(i)]; applied through M#.
            Eigen::VectorXd u_force = Eigen::VectorXd::Zero(q.size());
            for (int i = 0; i < e.cols(); ++i) u_force += coeffs[i] * (g * e.col(i));
            a += lu.solve(u_force);
        }
        return a;
    };
    return integrate_second_order(chart, accel, s0, t0, t1, cfg);
}

Trajectory integrate_geodesic(const MetricField& G, const ActuationFrame* frame,
                              const ControlLawFn& u, const TangentState& s0, double t0,
                              double t1, const IntegratorConfig& cfg, double fd_step) {
    const Chart& chart = G.chart();
    auto accel = [&G, frame, &u, &chart, fd_step](const Eigen::VectorXd& q,
                                                  const Eigen::VectorXd& v) {
        const ConnectionCoefficients conn = christoffel(G, q, fd_step);
        Eigen::VectorXd a = -christoffel_quadratic(conn, v);
        if (frame && u) {
            const Eigen::VectorXd coeffs = u(TangentState{q, v});
            const Eigen::MatrixXd e = frame->evaluate(chart.wrap(q));
            if (coeffs.size() != e.cols())
                throw Error("control law returned wrong number of coefficients");
            const Eigen::MatrixXd g = metric_eval(G, q);
            Eigen::VectorXd covector = Eigen::VectorXd::Zero(q.size());
            for (int i = 0; i < e.cols(); ++i) covector += coeffs[i] * (g * e.col(i));
            a += g.partialPivLu().solve(covector);
        }
        return a;
    };
    return integrate_second_order(chart, accel, s0, t0, t1, cfg);
}

double energy(const MetricField& M, const ScalarField& V, const TangentState& s) {
    const Eigen::MatrixXd g = metric_eval(M, s.q);
    return 0.5 * s.v.dot(g * s.v) + V(M.chart().wrap(s.q));
}

double action_evaluate(const MetricField& M, const ScalarField& V, const Trajectory& traj) {
    if (traj.size() < 2) throw Error("action needs at least two samples");
    double action = 0.0;
    double prev = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const TangentState& s = traj.states[k];
        const Eigen::MatrixXd g = metric_eval(M, s.q);
        const double lagrangian = 0.5 * s.v.dot(g * s.v) - V(M.chart().wrap(s.q));
        if (k > 0) action += 0.5 * (lagrangian + prev) * (traj.tau[k] - traj.tau[k - 1]);
        prev = lagrangian;
    }
    return action;
}

Eigen::VectorXd el_residual(const MetricField& M, const ScalarField& V,
                            const Eigen::VectorXd& q, const Eigen::VectorXd& v,
                            const Eigen::VectorXd& a, const Eigen::VectorXd& u_force,
                            double fd_step) {
    const ConnectionCoefficients conn = christoffel(M, q, fd_step);
    const Eigen::MatrixXd g = metric_eval(M, q);
    const Eigen::VectorXd grad = scalar_gradient(M.chart(), V, q, fd_step);
    Eigen::VectorXd res = g * (a + christoffel_quadratic(conn, v)) + grad;
    if (u_force.size() != 0) {
        if (u_force.size() != q.size()) throw Error("u_force has wrong dimension");
        res -= u_force;
    }
    return res;
}

Trajectory reparametrize_by_arclength(const MetricField& G, const Trajectory& traj) {
    if (traj.size() < 1) throw Error("cannot reparametrize an empty trajectory");
    const std::size_t count = traj.size();
    std::vector<double> speed(count);
    for (std::size_t k = 0; k < count; ++k) {
        const TangentState& s = traj.states[k];
        const Eigen::MatrixXd g = metric_eval(G, s.q);
        const double vv = s.v.dot(g * s.v);
        if (!(vv > defaults::kZeroSpeed))
            throw ZeroSpeed("G(v,v) below threshold at sample " + std::to_string(k));
        speed[k] = std::sqrt(vv);
    }
    Trajectory out;
    out.parameter_kind = ParameterKind::ArcLength;
    double s_acc = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
        if (k > 0)
            s_acc += 0.5 * (speed[k] + speed[k - 1]) * (traj.tau[k] - traj.tau[k - 1]);
        out.append(s_acc, TangentState{traj.states[k].q, traj.states[k].v / speed[k]});
    }
    return out;
}

namespace {

double coordinate_delta(double a, double b, bool periodic, double period) {
    double d = std::abs(a - b);
    if (periodic) {
        d = std::fmod(d, period);
        d = std::min(d, period - d);
    }
    return d;
}

double point_dist(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Chart* chart) {
    double sum = 0.0;
    for (int i = 0; i < a.size(); ++i) {
        const bool per = chart && chart->periodic(i);
        const double d = coordinate_delta(a[i], b[i], per, per ? chart->period(i) : 0.0);
        sum += d * d;
    }
    return std::sqrt(sum);
}

// max over points of A of the distance to the nearest point of B. Points are
// pruned through a window sorted along the first non-periodic axis; when
// every axis is periodic the search falls back to the quadratic scan.
double directed_hausdorff(const std::vector<Eigen::VectorXd>& a,
                          const std::vector<Eigen::VectorXd>& b, const Chart* chart) {
    int key = -1;
    const int n = static_cast<int>(a.front().size());
    for (int i = 0; i < n; ++i) {
        if (!chart || !chart->periodic(i)) {
            key = i;
            break;
        }
    }

    double worst = 0.0;
    if (key < 0) {
        for (const auto& p : a) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : b) best = std::min(best, point_dist(p, q, chart));
            worst = std::max(worst, best);
        }
        return worst;
    }

    std::vector<std::size_t> order(b.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return b[x][key] < b[y][key]; });

    for (const auto& p : a) {
        // Locate the insertion point along the key axis and expand outward
        // while the axis distance alone can still beat the best so far.
        const auto it = std::lower_bound(order.begin(), order.end(), p[key],
                                         [&](std::size_t idx, double val) {
                                             return b[idx][key] < val;
                                         });
        const long start = it - order.begin();
        double best = std::numeric_limits<double>::infinity();
        long lo = start - 1, hi = start;
        while (lo >= 0 || hi < static_cast<long>(order.size())) {
            bool advanced = false;
            if (hi < static_cast<long>(order.size())) {
                const auto& q = b[order[static_cast<std::size_t>(hi)]];
                if (q[key] - p[key] < best) {
                    best = std::min(best, point_dist(p, q, chart));
                    ++hi;
                    advanced = true;
                }
            }
            if (lo >= 0) {
                const auto& q = b[order[static_cast<std::size_t>(lo)]];
                if (p[key] - q[key] < best) {
                    best = std::min(best, point_dist(p, q, chart));
                    --lo;
                    advanced = true;
                }
            }
            if (!advanced) break;
        }
        worst = std::max(worst, best);
    }
    return worst;
}

double hausdorff(const Trajectory& ta, const Trajectory& tb, const Chart* chart) {
    if (ta.size() == 0 || tb.size() == 0)
        throw Error("path distance of an empty trajectory");
    std::vector<Eigen::VectorXd> a, b;
    a.reserve(ta.size());
    b.reserve(tb.size());
    for (const auto& s : ta.states) a.push_back(chart ? chart->wrap(s.q) : s.q);
    for (const auto& s : tb.states) b.push_back(chart ? chart->wrap(s.q) : s.q);
    return std::max(directed_hausdorff(a, b, chart), directed_hausdorff(b, a, chart));
}

}  // namespace

double path_distance(const Trajectory& a, const Trajectory& b, const Chart& chart) {
    return hausdorff(a, b, &chart);
}

double path_distance(const Trajectory& a, const Trajectory& b) {
    return hausdorff(a, b, nullptr);
}

}  // namespace geoctl
