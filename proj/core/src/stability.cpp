#include "geoctl/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "geoctl/defaults.hpp"
#include "geoctl/errors.hpp"
#include "geoctl/geometry.hpp"
#include "ode.hpp"

namespace geoctl {

namespace {

Eigen::VectorXd gamma_contract(const Tensor3& gamma, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& y) {
    const int n = static_cast<int>(x.size());
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < n; ++k) {
        double sum = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) sum += gamma(k, i, j) * x[i] * y[j];
        out[k] = sum;
    }
    return out;
}

}  // namespace

TidalOperator tidal_operator(const MetricField& G, const TangentState& s, double fd_step) {
    const int n = static_cast<int>(s.q.size());
    const CurvatureTensor curv = riemann(G, s.q, fd_step);
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double sum = 0.0;
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) sum += curv.riem(i, k, j, l) * s.v[k] * s.v[l];
            a(i, j) = sum;
        }
    }
    return TidalOperator{a};
}

Eigen::VectorXd stability_eigenvalues(const MetricField& G, const TangentState& s,
                                      double fd_step) {
    const TidalOperator a = tidal_operator(G, s, fd_step);
    Eigen::EigenSolver<Eigen::MatrixXd> es(a.matrix);
    Eigen::VectorXd real = es.eigenvalues().real();
    std::sort(real.data(), real.data() + real.size());
    return real;
}

Eigen::VectorXd transverse_eigenvalues(const MetricField& G, const TangentState& s,
                                       double fd_step) {
    const int n = static_cast<int>(s.q.size());
    if (n < 2) return Eigen::VectorXd();

    const Eigen::MatrixXd g = metric_eval(G, s.q);
    const double vv = s.v.dot(g * s.v);
    if (!(vv > 0.0))
        throw Error("transverse spectrum needs a velocity of positive G-norm");

    // G-orthonormal basis of the complement of v, by Gram-Schmidt over the
    // best-aligned coordinate axes.
    Eigen::MatrixXd basis(n, n - 1);
    int got = 0;
    Eigen::MatrixXd kept(n, n);
    kept.col(0) = s.v / std::sqrt(vv);
    for (int axis = 0; axis < n && got < n - 1; ++axis) {
        Eigen::VectorXd w = Eigen::VectorXd::Unit(n, axis);
        for (int j = 0; j <= got; ++j) w -= kept.col(j).dot(g * w) * kept.col(j);
        const double norm2 = w.dot(g * w);
        if (norm2 <= 1e-24) continue;
        w /= std::sqrt(norm2);
        kept.col(got + 1) = w;
        basis.col(got) = w;
        ++got;
    }
    if (got != n - 1)
        throw Error("failed to build a transverse basis; is G positive definite here?");

    const TidalOperator a = tidal_operator(G, s, fd_step);
    // The lowered tidal operator G A is symmetric and kills v, so the
    // transverse block in a G-orthonormal basis captures the whole spectrum
    // apart from the structural zero.
    Eigen::MatrixXd block(n - 1, n - 1);
    for (int r = 0; r < n - 1; ++r)
        for (int c = 0; c < n - 1; ++c)
            block(r, c) = basis.col(r).dot(g * (a.matrix * basis.col(c)));
    block = 0.5 * (block + block.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block);
    return es.eigenvalues();
}

DeviationTrajectory integrate_deviation(const MetricField& G, const TangentState& s0,
                                        const Eigen::VectorXd& J0,
                                        const Eigen::VectorXd& Jdot0, double t0, double t1,
                                        const IntegratorConfig& cfg, double fd_step) {
    const Chart& chart = G.chart();
    const int n = chart.dim();
    if (s0.q.size() != n || s0.v.size() != n || J0.size() != n || Jdot0.size() != n)
        throw DomainError("deviation state dimension does not match chart");
    if (!chart.contains(s0.q)) throw DomainError("initial state outside chart");

    // State y = [q, v, J, W] with W = DJ/dtau:
    //   dq = v, dv = -Gamma(v,v), dJ = W - Gamma(v,J), dW = -A J - Gamma(v,W).
    detail::OdeRhs rhs = [&](double, const Eigen::VectorXd& y) {
        const Eigen::VectorXd q = y.segment(0, n);
        const Eigen::VectorXd v = y.segment(n, n);
        const Eigen::VectorXd J = y.segment(2 * n, n);
        const Eigen::VectorXd W = y.segment(3 * n, n);
        const Tensor3 gamma = christoffel(G, q, fd_step).gamma;
        const Eigen::MatrixXd A = tidal_operator(G, TangentState{q, v}, fd_step).matrix;
        Eigen::VectorXd dy(4 * n);
        dy.segment(0, n) = v;
        dy.segment(n, n) = -gamma_contract(gamma, v, v);
        dy.segment(2 * n, n) = W - gamma_contract(gamma, v, J);
        dy.segment(3 * n, n) = -A * J - gamma_contract(gamma, v, W);
        return dy;
    };

    DeviationTrajectory out;
    detail::OdeRecord record = [&](double t, Eigen::VectorXd& y) {
        Eigen::VectorXd q = y.segment(0, n);
        if (!chart.contains(q))
            throw DomainExit("deviation trajectory left chart at t = " + std::to_string(t));
        q = chart.wrap(q);
        y.segment(0, n) = q;
        out.tau.push_back(t);
        out.states.push_back(TangentState{q, y.segment(n, n)});
        out.J.push_back(y.segment(2 * n, n));
        out.Jdot.push_back(y.segment(3 * n, n));
    };

    Eigen::VectorXd y0(4 * n);
    y0.segment(0, n) = s0.q;
    y0.segment(n, n) = s0.v;
    y0.segment(2 * n, n) = J0;
    y0.segment(3 * n, n) = Jdot0;
    try {
        detail::integrate_ode(rhs, t0, t1, y0, cfg, record);
    } catch (const DomainError& e) {
        throw DomainExit(std::string("deviation trajectory left chart: ") + e.what());
    }
    return out;
}

namespace {

std::vector<Eigen::VectorXd> direction_set(int n, int requested) {
    std::vector<Eigen::VectorXd> dirs;
    if (n == 1) {
        dirs.push_back(Eigen::VectorXd::Ones(1));
        return dirs;
    }
    if (n == 2) {
        const int count = requested > 0 ? requested : 16;
        dirs.reserve(static_cast<std::size_t>(count));
        for (int k = 0; k < count; ++k) {
            const double angle = 2.0 * std::numbers::pi * k / count;
            Eigen::VectorXd d(2);
            d << std::cos(angle), std::sin(angle);
            dirs.push_back(d);
        }
        return dirs;
    }
    if (n == 3) {
        const int count = requested > 0 ? requested : 64;
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (int k = 0; k < count; ++k) {
            const double z = 1.0 - 2.0 * (k + 0.5) / count;
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double phi = golden * k;
            Eigen::VectorXd d(3);
            d << r * std::cos(phi), r * std::sin(phi), z;
            dirs.push_back(d);
        }
        return dirs;
    }
    for (int axis = 0; axis < n; ++axis) {
        dirs.push_back(Eigen::VectorXd::Unit(n, axis));
        dirs.push_back(-Eigen::VectorXd::Unit(n, axis));
    }
    return dirs;
}

StabilityMapEntry classify_point(const MetricField& G, const Eigen::VectorXd& q,
                                 const std::vector<Eigen::VectorXd>& dirs,
                                 double fd_step) {
    StabilityMapEntry entry;
    entry.q = q;
    try {
        const Eigen::MatrixXd g = metric_eval(G, q);
        double min_eig = std::numeric_limits<double>::infinity();
        bool any = false;
        for (const auto& d : dirs) {
            const double norm2 = d.dot(g * d);
            if (!(norm2 > 0.0)) continue;  // direction null or timelike for this G
            const Eigen::VectorXd v = d / std::sqrt(norm2);
            // 1-dimensional charts carry no curvature; their single mode is 0.
            const Eigen::VectorXd eigs =
                q.size() < 2 ? Eigen::VectorXd::Zero(1).eval()
                             : transverse_eigenvalues(G, TangentState{q, v}, fd_step);
            min_eig = std::min(min_eig, eigs.minCoeff());
            any = true;
        }
        if (!any) throw DegenerateMetric("no direction with positive G-norm");
        entry.min_eig = min_eig;
        entry.cls = min_eig < 0.0 ? StabilityClass::Unstable : StabilityClass::Stable;
    } catch (const Error&) {
        entry.min_eig = std::numeric_limits<double>::quiet_NaN();
        entry.cls = StabilityClass::Excluded;
    }
    return entry;
}

}  // namespace

StabilityMap classify_region(const MetricField& G, const RegionGrid& grid,
                             int velocity_samples, double fd_step, int threads) {
    const Chart& chart = G.chart();
    const int n = chart.dim();
    if (static_cast<int>(grid.region.size()) != n ||
        static_cast<int>(grid.counts.size()) != n)
        throw Error("grid dimension does not match chart");

    // Tensor grid, inclusive endpoints.
    std::vector<Eigen::VectorXd> points;
    long total = 1;
    for (int c : grid.counts) {
        if (c < 1) throw Error("grid counts must be positive");
        total *= c;
    }
    points.reserve(static_cast<std::size_t>(total));
    for (long flat = 0; flat < total; ++flat) {
        Eigen::VectorXd q(n);
        long rest = flat;
        for (int axis = 0; axis < n; ++axis) {
            const int c = grid.counts[static_cast<std::size_t>(axis)];
            const int slot = static_cast<int>(rest % c);
            rest /= c;
            const auto [lo, hi] = grid.region[static_cast<std::size_t>(axis)];
            q[axis] = c == 1 ? 0.5 * (lo + hi)
                             : lo + (hi - lo) * slot / static_cast<double>(c - 1);
        }
        points.push_back(q);
    }

    const std::vector<Eigen::VectorXd> dirs = direction_set(n, velocity_samples);

    StabilityMap map;
    map.entries.resize(points.size());
    auto worker = [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k)
            map.entries[k] = classify_point(G, points[k], dirs, fd_step);
    };
    const int nthreads = std::max(1, threads);
    if (nthreads == 1) {
        worker(0, points.size());
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (points.size() + nthreads - 1) / nthreads;
        for (int t = 0; t < nthreads; ++t) {
            const std::size_t begin = std::min(points.size(), t * chunk);
            const std::size_t end = std::min(points.size(), begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(worker, begin, end);
        }
        for (auto& t : pool) t.join();
    }

    // Deterministic aggregation in grid order.
    long classified = 0, unstable = 0;
    double global = std::numeric_limits<double>::infinity();
    for (const auto& entry : map.entries) {
        if (entry.cls == StabilityClass::Excluded) {
            ++map.excluded;
            continue;
        }
        ++classified;
        if (entry.cls == StabilityClass::Unstable) ++unstable;
        global = std::min(global, entry.min_eig);
    }
    map.min_eig_global = classified ? global : std::numeric_limits<double>::quiet_NaN();
    map.unstable_fraction =
        classified ? static_cast<double>(unstable) / static_cast<double>(classified) : 0.0;
    return map;
}

std::string stability_map_csv(const StabilityMap& map, const Chart& chart) {
    std::ostringstream os;
    for (int i = 1; i <= chart.dim(); ++i) os << "q" << i << ",";
    os << "min_eig,class\n";
    for (const auto& entry : map.entries) {
        for (int i = 0; i < chart.dim(); ++i) os << format_g17(entry.q[i]) << ",";
        os << format_g17(entry.min_eig) << ",";
        switch (entry.cls) {
            case StabilityClass::Stable: os << "stable"; break;
            case StabilityClass::Unstable: os << "unstable"; break;
            case StabilityClass::Excluded: os << "excluded"; break;
        }
        os << "\n";
    }
    return os.str();
}

std::string stability_summary_json(const StabilityMap& map) {
    nlohmann::ordered_json j;
    j["unstable_fraction"] = map.unstable_fraction;
    j["min_eig_global"] = map.min_eig_global;
    j["points"] = map.entries.size();
    j["excluded"] = map.excluded;
    return j.dump(2);
}

}  // namespace geoctl
