#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "geoctl/cost.hpp"
#include "geoctl/shaping.hpp"

namespace geoctl {

/// Parametric family of candidate closed-loop metrics with box bounds.
struct MetricFamily {
    int param_dim = 0;
    std::function<MetricField(const Eigen::VectorXd&)> instantiate;
    std::vector<std::array<double, 2>> bounds;
};

struct OptimizeWeights {
    double mu_match = 1e6;  // penalty on squared max matching residual
};

struct HistoryEntry {
    int iter;  // evaluation index, 0-based
    Eigen::VectorXd params;
    double cost;      // penalized objective
    double residual;  // max matching residual over the sampler
};

struct OptimizeResult {
    Eigen::VectorXd best_params;
    double best_cost = 0.0;
    double max_residual = 0.0;  // at the best parameters
    std::vector<HistoryEntry> history;
    int evaluations = 0;
    std::uint64_t seed = 0;
};

/// Derivative-free minimization of
///   cost_evaluate(spec, family(p), grid) + mu_match * max_residual(p)^2
/// by Nelder-Mead with restarts, candidates projected into bounds.
/// budget caps the evaluation count at budget * (param_dim + 1); budget 1
/// evaluates exactly the initial simplex. Deterministic given seed. Throws
/// AllCandidatesDegenerate when no evaluation produced a usable metric.
OptimizeResult constrained_optimize(const MetricFamily& family, const OpenLoopSystem& sys,
                                    const CostSpec& spec, const QuadratureGrid& grid,
                                    const StateSampler& sampler,
                                    const OptimizeWeights& weights, int budget,
                                    std::uint64_t seed, double fd_step = 0.0);

/// History CSV iter,param1..paramk,cost,residual.
std::string history_csv(const OptimizeResult& result);

/// Spot-checks the family invariant: instantiated metrics must evaluate
/// (symmetric, non-degenerate, off the Hill boundary) at every grid node
/// for bound corners, the center, and seeded uniform parameter draws.
/// Returns the first offending parameter vector, or an empty optional.
std::optional<Eigen::VectorXd> find_degenerate_member(const MetricFamily& family,
                                                      const QuadratureGrid& grid,
                                                      int param_samples = 8,
                                                      std::uint64_t seed = 0);

}  // namespace geoctl
