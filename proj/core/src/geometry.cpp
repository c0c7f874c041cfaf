#include "geoctl/geometry.hpp"

#include <cmath>
#include <sstream>

#include "geoctl/defaults.hpp"
#include "geoctl/errors.hpp"

// Index conventions used throughout:
//   gamma(k,i,j)    = Gamma^k_ij
//   riem(i,j,k,l)   = R^i_jkl = d_k Gamma^i_lj - d_l Gamma^i_kj
//                     + Gamma^i_km Gamma^m_lj - Gamma^i_lm Gamma^m_kj
// so R^i_jkl is antisymmetric in (k,l) and R(e_k, e_l) e_j = R^i_jkl e_i.

namespace geoctl {

namespace {

std::string point_string(const Eigen::VectorXd& q) {
    std::ostringstream os;
    os << "(";
    for (int i = 0; i < q.size(); ++i) os << (i ? ", " : "") << q[i];
    os << ")";
    return os.str();
}

// Symmetry and degeneracy checks on a raw metric value.
Eigen::MatrixXd validate_metric(const Eigen::MatrixXd& g, const Eigen::VectorXd& q, int n) {
    if (g.rows() != n || g.cols() != n)
        throw Error("metric evaluator returned a matrix of wrong size at " + point_string(q));
    const double asym = (g - g.transpose()).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
    if (asym > defaults::kSymmetry * scale)
        throw Error("metric evaluator returned a non-symmetric matrix at " + point_string(q));
    Eigen::MatrixXd gs = 0.5 * (g + g.transpose());
    const double det = gs.determinant();
    if (std::abs(det) <= defaults::kDegeneracy * std::pow(scale, n))
        throw DegenerateMetric("metric degenerate (|det| = " + std::to_string(std::abs(det)) +
                               ") at " + point_string(q));
    return gs;
}

// Evaluate at an already-wrapped stencil point, checking non-periodic bounds.
Eigen::MatrixXd eval_at_stencil(const MetricField& metric, const Eigen::VectorXd& q) {
    const Chart& chart = metric.chart();
    if (!chart.contains(q))
        throw DomainError("finite-difference stencil leaves chart at " + point_string(q));
    return validate_metric(metric.raw(chart.wrap(q)), q, chart.dim());
}

}  // namespace

double fd_step_for_axis(double fd_step, double coordinate) {
    if (fd_step > 0.0) return fd_step;
    return defaults::kFdRelative * std::max(1.0, std::abs(coordinate));
}

Eigen::MatrixXd metric_eval(const MetricField& metric, const Eigen::VectorXd& q) {
    const Chart& chart = metric.chart();
    if (q.size() != chart.dim())
        throw DomainError("point dimension does not match chart");
    const Eigen::VectorXd qw = chart.checked(q);
    return validate_metric(metric.raw(qw), qw, chart.dim());
}

Eigen::VectorXd sharp(const MetricField& metric, const Eigen::VectorXd& q,
                      const Eigen::VectorXd& w) {
    const Eigen::MatrixXd g = metric_eval(metric, q);
    return g.partialPivLu().solve(w);
}

Eigen::VectorXd flat(const MetricField& metric, const Eigen::VectorXd& q,
                     const Eigen::VectorXd& x) {
    return metric_eval(metric, q) * x;
}

Tensor3 metric_derivative(const MetricField& metric, const Eigen::VectorXd& q,
                          double fd_step) {
    const Chart& chart = metric.chart();
    const int n = chart.dim();
    const Eigen::VectorXd qw = chart.checked(q);

    if (metric.has_derivative()) {
        Tensor3 d = metric.analytic_derivative(qw);
        if (d.dim() != n) throw Error("analytic metric derivative has wrong dimension");
        return d;
    }

    Tensor3 d(n);
    for (int k = 0; k < n; ++k) {
        const double h = fd_step_for_axis(fd_step, qw[k]);
        Eigen::VectorXd qp = qw, qm = qw;
        qp[k] += h;
        qm[k] -= h;
        const Eigen::MatrixXd gp = eval_at_stencil(metric, qp);
        const Eigen::MatrixXd gm = eval_at_stencil(metric, qm);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) d(k, i, j) = (gp(i, j) - gm(i, j)) / (2.0 * h);
    }
    return d;
}

ConnectionCoefficients christoffel(const MetricField& metric, const Eigen::VectorXd& q,
                                   double fd_step) {
    const Chart& chart = metric.chart();
    const int n = chart.dim();
    const Eigen::VectorXd qw = chart.checked(q);

    const Eigen::MatrixXd g = validate_metric(metric.raw(qw), qw, n);
    const Tensor3 dg = metric_derivative(metric, qw, fd_step);
    const Eigen::MatrixXd ginv = g.inverse();

    ConnectionCoefficients out{Tensor3(n)};
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                double sum = 0.0;
                for (int l = 0; l < n; ++l)
                    sum += ginv(k, l) * (dg(i, j, l) + dg(j, i, l) - dg(l, i, j));
                const double value = 0.5 * sum;
                out.gamma(k, i, j) = value;
                out.gamma(k, j, i) = value;
            }
        }
    }
    return out;
}

CurvatureTensor riemann(const MetricField& metric, const Eigen::VectorXd& q,
                        double fd_step) {
    const Chart& chart = metric.chart();
    const int n = chart.dim();
    const Eigen::VectorXd qw = chart.checked(q);

    const Tensor3 center = christoffel(metric, qw, fd_step).gamma;

    // d_a Gamma^k_ij by central differences of the connection itself.
    std::vector<Tensor3> dgamma;
    dgamma.reserve(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
        const double h = fd_step_for_axis(fd_step, qw[a]);
        Eigen::VectorXd qp = qw, qm = qw;
        qp[a] += h;
        qm[a] -= h;
        if (!chart.contains(qp) || !chart.contains(qm))
            throw DomainError("curvature stencil leaves chart at " + point_string(qw));
        const Tensor3 gp = christoffel(metric, qp, fd_step).gamma;
        const Tensor3 gm = christoffel(metric, qm, fd_step).gamma;
        Tensor3 d(n);
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    d(k, i, j) = (gp(k, i, j) - gm(k, i, j)) / (2.0 * h);
        dgamma.push_back(std::move(d));
    }

    CurvatureTensor out{Tensor4(n)};
    for (int k = 0; k < n; ++k) {
        for (int l = k + 1; l < n; ++l) {
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    double r = dgamma[static_cast<std::size_t>(k)](i, l, j) -
                               dgamma[static_cast<std::size_t>(l)](i, k, j);
                    for (int m = 0; m < n; ++m)
                        r += center(i, k, m) * center(m, l, j) -
                             center(i, l, m) * center(m, k, j);
                    out.riem(i, j, k, l) = r;
                    out.riem(i, j, l, k) = -r;
                }
            }
        }
    }
    return out;
}

std::vector<Eigen::VectorXd> coframe(const MetricField& metric, const ActuationFrame& frame,
                                     const Eigen::VectorXd& q) {
    const Eigen::VectorXd qw = metric.chart().checked(q);
    const Eigen::MatrixXd g = metric_eval(metric, qw);
    const Eigen::MatrixXd e = frame.evaluate(qw);
    std::vector<Eigen::VectorXd> thetas;
    thetas.reserve(static_cast<std::size_t>(e.cols()));
    for (int i = 0; i < e.cols(); ++i) thetas.push_back(g * e.col(i));
    return thetas;
}

Tensor4 lower_riemann(const Eigen::MatrixXd& g, const CurvatureTensor& curv) {
    const int n = static_cast<int>(g.rows());
    Tensor4 low(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double sum = 0.0;
                    for (int m = 0; m < n; ++m) sum += g(i, m) * curv.riem(m, j, k, l);
                    low(i, j, k, l) = sum;
                }
    return low;
}

double sectional_curvature(const MetricField& metric, const Eigen::VectorXd& q,
                           const Eigen::VectorXd& u, const Eigen::VectorXd& w,
                           double fd_step) {
    const Eigen::MatrixXd g = metric_eval(metric, q);
    const Tensor4 low = lower_riemann(g, riemann(metric, q, fd_step));
    const int n = static_cast<int>(g.rows());

    // <R(u,w)w, u> = R_ijkl u^i w^j u^k w^l with riem(i,j,k,l) = R^i_jkl,
    // i.e. numerator = low(i, j, k, l) u^i w^j u^k w^l.
    double num = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) num += low(i, j, k, l) * u[i] * w[j] * u[k] * w[l];

    const double uu = u.dot(g * u);
    const double ww = w.dot(g * w);
    const double uw = u.dot(g * w);
    const double denom = uu * ww - uw * uw;
    if (std::abs(denom) < 1e-300)
        throw Error("sectional curvature of a degenerate plane");
    return num / denom;
}

Eigen::VectorXd scalar_gradient(const Chart& chart, const ScalarField& f,
                                const Eigen::VectorXd& q, double fd_step) {
    const Eigen::VectorXd qw = chart.checked(q);
    if (f.has_gradient()) return f.analytic_gradient(qw);

    const int n = chart.dim();
    Eigen::VectorXd grad(n);
    for (int k = 0; k < n; ++k) {
        const double h = fd_step_for_axis(fd_step, qw[k]);
        Eigen::VectorXd qp = qw, qm = qw;
        qp[k] += h;
        qm[k] -= h;
        if (!chart.contains(qp) || !chart.contains(qm))
            throw DomainError("gradient stencil leaves chart at " + point_string(qw));
        grad[k] = (f(chart.wrap(qp)) - f(chart.wrap(qm))) / (2.0 * h);
    }
    return grad;
}

}  // namespace geoctl
