#include "geoctl/cost.hpp"

#include <cmath>

#include "geoctl/errors.hpp"
#include "geoctl/geometry.hpp"
#include "geoctl/tensor.hpp"

namespace geoctl {

ScalarInvariants scalar_invariants(const MetricField& G, const Eigen::VectorXd& q,
                                   double fd_step) {
    const Eigen::MatrixXd g = metric_eval(G, q);
    const int n = static_cast<int>(g.rows());
    const CurvatureTensor curv = riemann(G, q, fd_step);
    const Eigen::MatrixXd ginv = g.inverse();

    // Ricci and scalar curvature.
    Eigen::MatrixXd ricci = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
            double sum = 0.0;
            for (int i = 0; i < n; ++i) sum += curv.riem(i, j, i, l);
            ricci(j, l) = sum;
        }
    double scalar = 0.0;
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) scalar += ginv(j, l) * ricci(j, l);

    // Full quadratic contraction of the lowered tensor.
    const Tensor4 low = lower_riemann(g, curv);
    Tensor4 up(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double sum = 0.0;
                    for (int a = 0; a < n; ++a)
                        for (int b = 0; b < n; ++b)
                            for (int c = 0; c < n; ++c)
                                for (int d = 0; d < n; ++d)
                                    sum += ginv(i, a) * ginv(j, b) * ginv(k, c) *
                                           ginv(l, d) * low(a, b, c, d);
                    up(i, j, k, l) = sum;
                }
    double riem2 = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) riem2 += low(i, j, k, l) * up(i, j, k, l);

    return ScalarInvariants{scalar, riem2};
}

namespace {

struct Axis {
    std::vector<double> nodes;
    std::vector<double> weights;
};

Axis axis_rule(double lo, double hi, int count, QuadratureGrid::Rule rule) {
    Axis axis;
    if (rule == QuadratureGrid::Rule::Midpoint) {
        const double h = (hi - lo) / count;
        for (int i = 0; i < count; ++i) {
            axis.nodes.push_back(lo + (i + 0.5) * h);
            axis.weights.push_back(h);
        }
    } else {
        if (count < 2) throw Error("trapezoid rule needs at least 2 nodes per axis");
        const double h = (hi - lo) / (count - 1);
        for (int i = 0; i < count; ++i) {
            axis.nodes.push_back(lo + i * h);
            axis.weights.push_back((i == 0 || i == count - 1) ? 0.5 * h : h);
        }
    }
    return axis;
}

}  // namespace

double cost_evaluate(const CostSpec& spec, const MetricField& G, const QuadratureGrid& grid,
                     double fd_step) {
    if (!spec.active()) throw Error("cost spec has no active term");
    if (spec.track != 0.0 && !spec.r_target)
        throw Error("tracking cost needs a target curvature profile");
    const int n = G.chart().dim();
    if (static_cast<int>(grid.region.size()) != n ||
        static_cast<int>(grid.counts.size()) != n)
        throw Error("grid dimension does not match chart");

    std::vector<Axis> axes;
    long total = 1;
    for (int axis = 0; axis < n; ++axis) {
        const auto [lo, hi] = grid.region[static_cast<std::size_t>(axis)];
        const int count = grid.counts[static_cast<std::size_t>(axis)];
        if (count < 1) throw Error("grid counts must be positive");
        if (!(hi > lo)) throw Error("grid region must have positive extent");
        axes.push_back(axis_rule(lo, hi, count, grid.rule));
        total *= static_cast<long>(axes.back().nodes.size());
    }

    double sum = 0.0;
    Eigen::VectorXd q(n);
    for (long flat = 0; flat < total; ++flat) {
        long rest = flat;
        double weight = 1.0;
        for (int axis = 0; axis < n; ++axis) {
            const auto& ax = axes[static_cast<std::size_t>(axis)];
            const int slot = static_cast<int>(rest % static_cast<long>(ax.nodes.size()));
            rest /= static_cast<long>(ax.nodes.size());
            q[axis] = ax.nodes[static_cast<std::size_t>(slot)];
            weight *= ax.weights[static_cast<std::size_t>(slot)];
        }

        const Eigen::MatrixXd g = metric_eval(G, q);
        const double volume = std::sqrt(std::abs(g.determinant()));

        double f = spec.constant;
        if (spec.needs_curvature()) {
            const ScalarInvariants inv = scalar_invariants(G, q, fd_step);
            f += spec.scalar * inv.R + spec.scalar_sq * inv.R * inv.R +
                 spec.riem_sq * inv.riem2;
            if (spec.track != 0.0) {
                const double d = inv.R - spec.r_target(q);
                f += spec.track * d * d;
            }
        }
        sum += weight * f * volume;
    }
    return sum;
}

}  // namespace geoctl
