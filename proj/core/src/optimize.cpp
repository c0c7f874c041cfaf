#include "geoctl/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "geoctl/errors.hpp"
#include "geoctl/trajectory.hpp"

namespace geoctl {

namespace {

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct Objective {
    const MetricFamily& family;
    const OpenLoopSystem& sys;
    const CostSpec& spec;
    const QuadratureGrid& grid;
    const std::vector<TangentState>& states;
    double mu;
    double fd_step;

    int evaluations = 0;
    bool any_valid = false;
    std::vector<HistoryEntry>* history;
    Eigen::VectorXd best_params;
    double best_value = std::numeric_limits<double>::infinity();
    double best_residual = std::numeric_limits<double>::infinity();

    double operator()(const Eigen::VectorXd& p) {
        const double inf = std::numeric_limits<double>::infinity();
        double value = inf, residual = inf;
        try {
            const MetricField G = family.instantiate(p);
            double max_res = 0.0;
            for (const auto& s : states) {
                const double r =
                    solve_pointwise_matching(sys, G, s, fd_step).residual_norm;
                max_res = std::max(max_res, r);
            }
            value = cost_evaluate(spec, G, grid, fd_step) + mu * max_res * max_res;
            residual = max_res;
            any_valid = true;
        } catch (const Error&) {
            // degenerate or Hill-violating candidate: scored as +inf
        }
        history->push_back(HistoryEntry{evaluations, p, value, residual});
        ++evaluations;
        if (value < best_value) {
            best_value = value;
            best_params = p;
            best_residual = residual;
        }
        return value;
    }
};

}  // namespace

OptimizeResult constrained_optimize(const MetricFamily& family, const OpenLoopSystem& sys,
                                    const CostSpec& spec, const QuadratureGrid& grid,
                                    const StateSampler& sampler,
                                    const OptimizeWeights& weights, int budget,
                                    std::uint64_t seed, double fd_step) {
    const int k = family.param_dim;
    if (k < 1) throw Error("metric family needs at least one parameter");
    if (static_cast<int>(family.bounds.size()) != k)
        throw Error("family bounds do not match param_dim");
    if (budget < 1) throw Error("budget must be at least 1");

    // Matching states are drawn once so every candidate sees the same set.
    const std::vector<TangentState> states = sample_states(sampler, sys);

    OptimizeResult result;
    result.seed = seed;
    Objective objective{family, sys,    spec, grid, states,
                        weights.mu_match, fd_step};
    objective.history = &result.history;

    std::mt19937_64 rng(seed);
    const int max_evals = budget * (k + 1);

    auto clamp = [&](Eigen::VectorXd p) {
        for (int i = 0; i < k; ++i) {
            const auto [lo, hi] = family.bounds[static_cast<std::size_t>(i)];
            p[i] = std::clamp(p[i], lo, hi);
        }
        return p;
    };
    auto random_point = [&]() {
        Eigen::VectorXd p(k);
        for (int i = 0; i < k; ++i) {
            const auto [lo, hi] = family.bounds[static_cast<std::size_t>(i)];
            p[i] = lo + (hi - lo) * uniform01(rng);
        }
        return p;
    };

    // Nelder-Mead with restarts until the evaluation budget is spent.
    const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
    while (objective.evaluations < max_evals) {
        std::vector<Eigen::VectorXd> x;
        std::vector<double> f;
        const Eigen::VectorXd x0 = random_point();
        for (int i = 0; i <= k; ++i) {
            Eigen::VectorXd p = x0;
            if (i > 0) {
                const auto [lo, hi] = family.bounds[static_cast<std::size_t>(i - 1)];
                const double delta = 0.1 * (hi - lo);
                p[i - 1] = (p[i - 1] + delta <= hi) ? p[i - 1] + delta : p[i - 1] - delta;
            }
            if (objective.evaluations >= max_evals) break;
            x.push_back(p);
            f.push_back(objective(p));
        }
        if (x.size() < static_cast<std::size_t>(k + 1)) break;

        while (objective.evaluations < max_evals) {
            // Order vertices by value.
            std::vector<std::size_t> order(x.size());
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
            std::sort(order.begin(), order.end(),
                      [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
            std::vector<Eigen::VectorXd> xs;
            std::vector<double> fs;
            for (std::size_t i : order) {
                xs.push_back(x[i]);
                fs.push_back(f[i]);
            }
            x = xs;
            f = fs;

            // Converged simplex: restart from a fresh random point.
            double spread = 0.0;
            for (int i = 1; i <= k; ++i) spread = std::max(spread, (x[static_cast<std::size_t>(i)] - x[0]).norm());
            const bool flat_values =
                std::isfinite(f[0]) &&
                std::abs(f[static_cast<std::size_t>(k)] - f[0]) <=
                    1e-14 * (1.0 + std::abs(f[0]));
            if (spread <= 1e-12 || flat_values) break;

            Eigen::VectorXd centroid = Eigen::VectorXd::Zero(k);
            for (int i = 0; i < k; ++i) centroid += x[static_cast<std::size_t>(i)];
            centroid /= static_cast<double>(k);

            const Eigen::VectorXd& worst = x[static_cast<std::size_t>(k)];
            const Eigen::VectorXd xr = clamp(centroid + alpha * (centroid - worst));
            const double fr = objective(xr);

            if (fr < f[0]) {
                if (objective.evaluations >= max_evals) break;
                const Eigen::VectorXd xe = clamp(centroid + gamma * (centroid - worst));
                const double fe = objective(xe);
                if (fe < fr) {
                    x[static_cast<std::size_t>(k)] = xe;
                    f[static_cast<std::size_t>(k)] = fe;
                } else {
                    x[static_cast<std::size_t>(k)] = xr;
                    f[static_cast<std::size_t>(k)] = fr;
                }
            } else if (fr < f[static_cast<std::size_t>(k - 1)]) {
                x[static_cast<std::size_t>(k)] = xr;
                f[static_cast<std::size_t>(k)] = fr;
            } else {
                if (objective.evaluations >= max_evals) break;
                const bool outside = fr < f[static_cast<std::size_t>(k)];
                const Eigen::VectorXd base = outside ? xr : worst;
                const Eigen::VectorXd xc = clamp(centroid + rho * (base - centroid));
                const double fc = objective(xc);
                if (fc < std::min(fr, f[static_cast<std::size_t>(k)])) {
                    x[static_cast<std::size_t>(k)] = xc;
                    f[static_cast<std::size_t>(k)] = fc;
                } else {
                    // Shrink toward the best vertex.
                    for (int i = 1; i <= k; ++i) {
                        if (objective.evaluations >= max_evals) break;
                        x[static_cast<std::size_t>(i)] =
                            clamp(x[0] + sigma * (x[static_cast<std::size_t>(i)] - x[0]));
                        f[static_cast<std::size_t>(i)] = objective(x[static_cast<std::size_t>(i)]);
                    }
                }
            }
        }
    }

    if (!objective.any_valid)
        throw AllCandidatesDegenerate(
            "no in-bounds family parameter produced a usable metric");

    result.best_params = objective.best_params;
    result.best_cost = objective.best_value;
    result.max_residual = objective.best_residual;
    result.evaluations = objective.evaluations;
    return result;
}

std::optional<Eigen::VectorXd> find_degenerate_member(const MetricFamily& family,
                                                      const QuadratureGrid& grid,
                                                      int param_samples, std::uint64_t seed) {
    const int k = family.param_dim;
    std::vector<Eigen::VectorXd> candidates;

    // Bound corners (up to 2^k for small k), the center, and random draws.
    if (k <= 6) {
        for (long mask = 0; mask < (1L << k); ++mask) {
            Eigen::VectorXd p(k);
            for (int i = 0; i < k; ++i)
                p[i] = family.bounds[static_cast<std::size_t>(i)][(mask >> i) & 1];
            candidates.push_back(p);
        }
    }
    Eigen::VectorXd center(k);
    for (int i = 0; i < k; ++i)
        center[i] = 0.5 * (family.bounds[static_cast<std::size_t>(i)][0] +
                           family.bounds[static_cast<std::size_t>(i)][1]);
    candidates.push_back(center);
    std::mt19937_64 rng(seed);
    for (int s = 0; s < param_samples; ++s) {
        Eigen::VectorXd p(k);
        for (int i = 0; i < k; ++i) {
            const auto [lo, hi] = family.bounds[static_cast<std::size_t>(i)];
            p[i] = lo + (hi - lo) * uniform01(rng);
        }
        candidates.push_back(p);
    }

    CostSpec volume_only;
    volume_only.constant = 1.0;
    for (const auto& p : candidates) {
        try {
            const MetricField G = family.instantiate(p);
            (void)cost_evaluate(volume_only, G, grid);  // evaluates every node
        } catch (const Error&) {
            return p;
        }
    }
    return std::nullopt;
}

std::string history_csv(const OptimizeResult& result) {
    std::ostringstream os;
    const int k = result.history.empty() ? 0 : static_cast<int>(result.history[0].params.size());
    os << "iter";
    for (int i = 1; i <= k; ++i) os << ",param" << i;
    os << ",cost,residual\n";
    for (const auto& entry : result.history) {
        os << entry.iter;
        for (int i = 0; i < k; ++i) os << "," << format_g17(entry.params[i]);
        os << "," << format_g17(entry.cost) << "," << format_g17(entry.residual) << "\n";
    }
    return os.str();
}

}  // namespace geoctl
