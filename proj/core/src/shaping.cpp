#include "geoctl/shaping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "geoctl/defaults.hpp"
#include "geoctl/errors.hpp"
#include "geoctl/geometry.hpp"

namespace geoctl {

namespace {

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

bool positive_definite(const Eigen::MatrixXd& g) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() > 0.0;
}

}  // namespace

MetricField jacobi_metric(const MetricField& M, const ScalarField& V, double E) {
    const Chart chart = M.chart();
    auto factor = [V, E, chart](const Eigen::VectorXd& q) {
        const double f = 2.0 * (E - V(chart.wrap(q)));
        if (f < 2.0 * defaults::kJacobiEpsilon)
            throw HillBoundary("Jacobi factor 2(E - V) = " + std::to_string(f) +
                               " at the Hill boundary");
        return f;
    };

    MetricField::Fn value = [M, factor](const Eigen::VectorXd& q) {
        return (factor(q) * M.raw(q)).eval();
    };

    if (M.has_derivative() && V.has_gradient()) {
        MetricField::DerivFn deriv = [M, V, factor, chart](const Eigen::VectorXd& q) {
            const double f = factor(q);
            const Eigen::MatrixXd g = M.raw(q);
            const Tensor3 dM = M.analytic_derivative(q);
            const Eigen::VectorXd gradV = V.analytic_gradient(chart.wrap(q));
            const int n = chart.dim();
            Tensor3 d(n);
            for (int k = 0; k < n; ++k)
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        d(k, i, j) = f * dM(k, i, j) - 2.0 * gradV[k] * g(i, j);
            return d;
        };
        return MetricField(chart, std::move(value), std::move(deriv));
    }
    return MetricField(chart, std::move(value));
}

OpenLoopSystem make_open_loop(const SystemSpec& spec, double E) {
    return OpenLoopSystem{spec.chart, jacobi_metric(spec.M, spec.V, E), spec.frame, E,
                          spec.M, spec.V};
}

Eigen::VectorXd connection_difference(const MetricField& G_cl, const MetricField& G_ol,
                                      const TangentState& s, double fd_step) {
    const ConnectionCoefficients cl = christoffel(G_cl, s.q, fd_step);
    const ConnectionCoefficients ol = christoffel(G_ol, s.q, fd_step);
    const int n = static_cast<int>(s.q.size());
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < n; ++k) {
        double sum = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                sum += (cl.gamma(k, i, j) - ol.gamma(k, i, j)) * s.v[i] * s.v[j];
        out[k] = sum;
    }
    return out;
}

MatchingReport solve_pointwise_matching(const OpenLoopSystem& sys, const MetricField& G_cl,
                                        const TangentState& s, double fd_step) {
    const Eigen::VectorXd qw = sys.chart.checked(s.q);

    // The forced open-loop flow follows closed-loop geodesics when the
    // frame span absorbs (Gamma_ol - Gamma_cl)[v,v]; decompose that defect.
    const Eigen::VectorXd defect = -connection_difference(G_cl, sys.G_ol, s, fd_step);

    const Eigen::MatrixXd e = sys.frame.evaluate(qw);
    const Eigen::MatrixXd g = metric_eval(sys.G_ol, qw);
    const bool pd = positive_definite(g);

    // Least squares in the G_ol inner product (Euclidean when G_ol is not
    // positive definite there).
    const Eigen::MatrixXd weight = pd ? g : Eigen::MatrixXd::Identity(g.rows(), g.cols());
    const Eigen::MatrixXd gram = e.transpose() * weight * e;
    const Eigen::VectorXd rhs = e.transpose() * weight * defect;
    const Eigen::VectorXd u = gram.ldlt().solve(rhs);
    const Eigen::VectorXd residual = defect - e * u;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ev = es.eigenvalues().cwiseAbs();
    const double cond =
        ev.minCoeff() > 0.0 ? ev.maxCoeff() / ev.minCoeff()
                            : std::numeric_limits<double>::infinity();

    MatchingReport report;
    report.u_coeffs = u;
    report.residual_vector = residual;
    report.residual_norm = std::sqrt(std::abs(residual.dot(weight * residual)));
    report.decomposition_condition = cond;
    report.point = qw;
    report.velocity = s.v;
    report.euclidean_fallback = !pd;
    const double state_energy = 0.5 * s.v.dot(metric_eval(sys.M, qw) * s.v) +
                                sys.V(qw);
    report.off_shell = std::abs(state_energy - sys.E) >
                       defaults::kOffShellRel * std::max(1.0, std::abs(sys.E));
    return report;
}

std::string matching_report_json(const MatchingReport& report) {
    nlohmann::ordered_json j;
    j["u_coeffs"] = std::vector<double>(report.u_coeffs.begin(), report.u_coeffs.end());
    j["residual_vector"] =
        std::vector<double>(report.residual_vector.begin(), report.residual_vector.end());
    j["residual_norm"] = report.residual_norm;
    j["condition"] = report.decomposition_condition;
    j["point"] = std::vector<double>(report.point.begin(), report.point.end());
    j["velocity"] = std::vector<double>(report.velocity.begin(), report.velocity.end());
    j["off_shell"] = report.off_shell;
    j["euclidean_fallback"] = report.euclidean_fallback;
    return j.dump(2);
}

std::vector<TangentState> sample_states(const StateSampler& sampler,
                                        const OpenLoopSystem& sys) {
    const int n = sys.chart.dim();
    if (static_cast<int>(sampler.region.size()) != n)
        throw Error("sampler region dimension does not match chart");
    if (sampler.count < 1) throw Error("sampler count must be positive");

    std::mt19937_64 rng(sampler.seed);
    const int side = std::max(1, static_cast<int>(std::ceil(
                                     std::pow(static_cast<double>(sampler.count),
                                              1.0 / static_cast<double>(n)))));

    std::vector<TangentState> states;
    states.reserve(static_cast<std::size_t>(sampler.count));
    long attempts = 0;
    const long max_attempts = 200L * sampler.count;
    int cell = 0;
    while (static_cast<int>(states.size()) < sampler.count) {
        if (++attempts > max_attempts)
            throw HillBoundary("sampler could not find states with E - V above threshold");

        // Walk the grid cells in order, jittering inside each cell.
        Eigen::VectorXd q(n), v(n);
        int index = cell++ % static_cast<int>(std::pow(side, n));
        for (int axis = 0; axis < n; ++axis) {
            const auto [lo, hi] = sampler.region[static_cast<std::size_t>(axis)];
            const double width = (hi - lo) / side;
            const int slot = index % side;
            index /= side;
            const double center = lo + (slot + 0.5) * width;
            q[axis] = center + 0.5 * width * (uniform01(rng) - 0.5);
            v[axis] = uniform(rng, -sampler.velocity_scale, sampler.velocity_scale);
        }
        if (!sys.chart.contains(q)) continue;
        const Eigen::VectorXd qw = sys.chart.wrap(q);
        if (sys.E - sys.V(qw) < defaults::kJacobiEpsilon) continue;
        states.push_back(TangentState{qw, v});
    }
    return states;
}

namespace {

std::vector<double> residuals_over(const OpenLoopSystem& sys, const MetricField& G_cl,
                                   const std::vector<TangentState>& states,
                                   double fd_step, int threads) {
    std::vector<double> out(states.size(), 0.0);
    auto worker = [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k)
            out[k] = solve_pointwise_matching(sys, G_cl, states[k], fd_step).residual_norm;
    };
    const int nthreads = std::max(1, threads);
    if (nthreads == 1 || states.size() < 2) {
        worker(0, states.size());
        return out;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (states.size() + nthreads - 1) / nthreads;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (int t = 0; t < nthreads; ++t) {
        const std::size_t begin = std::min(states.size(), t * chunk);
        const std::size_t end = std::min(states.size(), begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&, begin, end] {
            try {
                worker(begin, end);
            } catch (...) {
                std::scoped_lock lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return out;
}

}  // namespace

MatchVerification verify_matching(const OpenLoopSystem& sys, const MetricField& G_cl,
                                  const std::vector<TangentState>& states, double tol,
                                  double fd_step, int threads) {
    if (states.empty()) throw Error("verify_matching needs at least one state");
    const std::vector<double> residuals =
        residuals_over(sys, G_cl, states, fd_step, threads);

    // Deterministic reduction in sample order regardless of thread count.
    MatchVerification v;
    v.samples = static_cast<int>(states.size());
    v.tol = tol;
    v.max_residual = -1.0;
    for (std::size_t k = 0; k < states.size(); ++k) {
        if (residuals[k] > v.max_residual) {
            v.max_residual = residuals[k];
            v.worst = states[k];
        }
    }
    v.pass = v.max_residual <= tol;
    return v;
}

MatchVerification verify_matching(const OpenLoopSystem& sys, const MetricField& G_cl,
                                  const StateSampler& sampler, double tol, double fd_step,
                                  int threads) {
    return verify_matching(sys, G_cl, sample_states(sampler, sys), tol, fd_step, threads);
}

ControlLaw extract_control_law(const OpenLoopSystem& sys, const MetricField& G_cl,
                               const StateSampler& sampler, double match_tol,
                               double fd_step) {
    const MatchVerification v = verify_matching(sys, G_cl, sampler, match_tol, fd_step);
    if (!v.pass) {
        std::ostringstream os;
        os << "matching residual " << v.max_residual << " above tolerance " << match_tol
           << " on the sample region";
        throw MatchingFailed(os.str());
    }
    ControlLawFn fn = [sys, G_cl, fd_step](const TangentState& s) {
        return solve_pointwise_matching(sys, G_cl, s, fd_step).u_coeffs;
    };
    return ControlLaw{std::move(fn)};
}

}  // namespace geoctl
