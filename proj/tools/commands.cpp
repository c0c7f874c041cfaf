#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <geoctl/defaults.hpp>
#include <geoctl/dynamics.hpp>
#include <geoctl/errors.hpp>
#include <geoctl/geometry.hpp>
#include <geoctl/optimize.hpp>

namespace geoctl::cli {

namespace fs = std::filesystem;

namespace {

void write_file_atomic(const fs::path& dir, const std::string& name,
                       const std::string& content) {
    fs::create_directories(dir);
    const fs::path target = dir / name;
    const fs::path tmp = dir / ("." + name + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, target);
}

json base_echo(const std::string& command, const SystemSpec& spec, std::uint64_t seed,
               double fd_step) {
    json j;
    j["command"] = command;
    j["system"] = echo_system(spec);
    j["seed"] = seed;
    j["fd_step"] = fd_step;
    return j;
}

// Named candidate closed-loop metrics available from config files. Richer
// families are library territory; these cover the catalog demos.
MetricField make_candidate(const OpenLoopSystem& sys, const json& j) {
    check_keys(j, "candidate", {"family"},
               {"lambda", "amplitude", "width", "center"});
    const std::string family = as_string(j.at("family"), "candidate.family");

    if (family == "flat") {
        return MetricField::constant(sys.chart,
                                     Eigen::MatrixXd::Identity(sys.chart.dim(), sys.chart.dim()));
    }

    if (family == "conformal") {
        const double lambda = get_number_or(j, "lambda", 1.0);
        if (!(lambda > 0.0)) throw ConfigError("candidate.lambda must be positive");
        const MetricField base = sys.G_ol;
        MetricField::Fn value = [base, lambda](const Eigen::VectorXd& q) {
            return (lambda * base.raw(q)).eval();
        };
        if (base.has_derivative()) {
            MetricField::DerivFn deriv = [base, lambda](const Eigen::VectorXd& q) {
                Tensor3 d = base.analytic_derivative(q);
                const int n = d.dim();
                Tensor3 out(n);
                for (int k = 0; k < n; ++k)
                    for (int a = 0; a < n; ++a)
                        for (int b = 0; b < n; ++b) out(k, a, b) = lambda * d(k, a, b);
                return out;
            };
            return MetricField(sys.chart, std::move(value), std::move(deriv));
        }
        return MetricField(sys.chart, std::move(value));
    }

    if (family == "bump") {
        // Gaussian bump added to the last diagonal component, off the span
        // of a cart-direction frame: a deliberate matching violation.
        const double amplitude = get_number_or(j, "amplitude", 0.3);
        const double width = get_number_or(j, "width", 0.5);
        if (!(width > 0.0)) throw ConfigError("candidate.width must be positive");
        Eigen::VectorXd center = Eigen::VectorXd::Zero(sys.chart.dim());
        if (j.contains("center")) {
            const std::vector<double> c = as_number_list(j.at("center"), "candidate.center");
            if (static_cast<int>(c.size()) != sys.chart.dim())
                throw ConfigError("candidate.center dimension mismatch");
            center = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<long>(c.size()));
        }
        const MetricField base = sys.G_ol;
        const Chart chart = sys.chart;
        auto bump = [amplitude, width, center](const Eigen::VectorXd& q) {
            return amplitude * std::exp(-(q - center).squaredNorm() / (width * width));
        };
        MetricField::Fn value = [base, bump, chart](const Eigen::VectorXd& q) {
            Eigen::MatrixXd g = base.raw(q);
            g(g.rows() - 1, g.cols() - 1) += bump(chart.wrap(q));
            return g;
        };
        if (base.has_derivative()) {
            MetricField::DerivFn deriv = [base, bump, width, center,
                                          chart](const Eigen::VectorXd& q) {
                Tensor3 d = base.analytic_derivative(q);
                const int n = d.dim();
                const Eigen::VectorXd qw = chart.wrap(q);
                const double b = bump(qw);
                for (int k = 0; k < n; ++k)
                    d(k, n - 1, n - 1) += b * (-2.0 * (qw[k] - center[k]) / (width * width));
                return d;
            };
            return MetricField(sys.chart, std::move(value), std::move(deriv));
        }
        return MetricField(sys.chart, std::move(value));
    }

    throw ConfigError("candidate.family must be one of flat, conformal, bump");
}

json candidate_echo(const json& j) {
    json echo;
    echo["family"] = as_string(j.at("family"), "candidate.family");
    if (j.contains("lambda")) echo["lambda"] = as_number(j.at("lambda"), "lambda");
    if (j.contains("amplitude")) echo["amplitude"] = as_number(j.at("amplitude"), "amplitude");
    if (j.contains("width")) echo["width"] = as_number(j.at("width"), "width");
    if (j.contains("center")) echo["center"] = j.at("center");
    return echo;
}

}  // namespace

int cmd_systems(const std::vector<std::string>& args) {
    if (args.empty() || (args[0] != "list" && args[0] != "show"))
        throw ConfigError("usage: geoctl systems list | geoctl systems show <name>");

    if (args[0] == "list") {
        json j = json::array();
        for (const auto& name : list_systems()) j.push_back(name);
        std::cout << j.dump(2) << "\n";
        return 0;
    }

    if (args.size() != 2) throw ConfigError("systems show needs a system name");
    SystemSpec spec = [&] {
        try {
            return get_system(args[1]);
        } catch (const UnknownSystem& e) {
            throw ConfigError(e.what());
        }
    }();

    json j;
    j["name"] = spec.name;
    j["dim"] = spec.chart.dim();
    j["coord_names"] = spec.chart.coord_names();
    json lower = json::array(), upper = json::array(), periodic = json::array();
    for (int i = 0; i < spec.chart.dim(); ++i) {
        // JSON has no infinities; unbounded axes serialize as null.
        if (std::isfinite(spec.chart.lower()[i])) lower.push_back(spec.chart.lower()[i]);
        else lower.push_back(nullptr);
        if (std::isfinite(spec.chart.upper()[i])) upper.push_back(spec.chart.upper()[i]);
        else upper.push_back(nullptr);
        periodic.push_back(spec.chart.periodic(i));
    }
    j["lower"] = lower;
    j["upper"] = upper;
    j["periodic"] = periodic;
    j["actuated"] = spec.frame.size();
    j["params"] = echo_system(spec)["params"];
    json refs = json::object();
    for (const auto& [name, ref] : spec.reference_data) {
        json r;
        r["value"] = ref.value;
        r["tag"] = ref.tag == RefTag::Trivial ? "TRIVIAL" : "DERIVED";
        refs[name] = r;
    }
    j["reference_data"] = refs;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_simulate(const json& config, const RunContext& ctx) {
    check_keys(config, "config",
               {"system", "flow", "initial_state", "t_span"},
               {"energy", "integrator", "fd_step", "seed", "output"});
    const SystemSpec spec = parse_system(config.at("system"));
    const std::string flow = as_string(config.at("flow"), "flow");
    if (flow != "euler_lagrange" && flow != "geodesic" && flow != "jacobi_geodesic")
        throw ConfigError("flow must be euler_lagrange, geodesic or jacobi_geodesic");
    if (flow == "jacobi_geodesic" && !config.contains("energy"))
        throw ConfigError("jacobi_geodesic flow needs 'energy'");
    const TangentState s0 = parse_state(config.at("initial_state"), "initial_state");
    const std::vector<double> span = as_number_list(config.at("t_span"), "t_span");
    if (span.size() != 2 || !(span[1] > span[0]))
        throw ConfigError("t_span must be [t0, t1] with t1 > t0");
    const IntegratorConfig integ =
        parse_integrator(config.contains("integrator") ? config.at("integrator") : json());
    const double fd_step = get_number_or(config, "fd_step", 0.0);
    const auto files = parse_output(config.contains("output") ? config.at("output") : json(),
                                    {"trajectory", "energy"},
                                    {{"trajectory", "trajectory.csv"}, {"energy", "energy.json"}});

    json resolved = base_echo("simulate", spec, ctx.seed, fd_step);
    resolved["flow"] = flow;
    if (config.contains("energy")) resolved["energy"] = as_number(config.at("energy"), "energy");
    resolved["initial_state"] = echo_state(s0);
    resolved["t_span"] = json::array({span[0], span[1]});
    resolved["integrator"] = echo_integrator(integ);

    Trajectory traj;
    std::function<double(const TangentState&)> conserved;
    if (flow == "euler_lagrange") {
        traj = integrate_euler_lagrange(spec.M, spec.V, nullptr, {}, s0, span[0], span[1],
                                        integ, fd_step);
        conserved = [&spec](const TangentState& s) { return energy(spec.M, spec.V, s); };
    } else {
        const MetricField G =
            flow == "geodesic"
                ? spec.M
                : jacobi_metric(spec.M, spec.V, as_number(config.at("energy"), "energy"));
        traj = integrate_geodesic(G, nullptr, {}, s0, span[0], span[1], integ, fd_step);
        conserved = [G](const TangentState& s) {
            return 0.5 * s.v.dot(metric_eval(G, s.q) * s.v);
        };
    }

    const double initial = conserved(traj.states.front());
    double max_abs_drift = 0.0;
    for (const auto& s : traj.states)
        max_abs_drift = std::max(max_abs_drift, std::abs(conserved(s) - initial));

    json report;
    report["initial"] = initial;
    report["final"] = conserved(traj.states.back());
    report["max_abs_drift"] = max_abs_drift;
    report["max_rel_drift"] =
        std::abs(initial) > 0.0 ? max_abs_drift / std::abs(initial) : max_abs_drift;
    report["samples"] = traj.size();
    report["config"] = resolved;

    write_file_atomic(ctx.out_dir, files.at("trajectory"), trajectory_csv(traj));
    write_file_atomic(ctx.out_dir, files.at("energy"), report.dump(2) + "\n");
    return 0;
}

int cmd_jacobi_compare(const json& config, const RunContext& ctx) {
    check_keys(config, "config", {"system", "initial_state", "t_span"},
               {"integrator", "fd_step", "seed", "output"});
    const SystemSpec spec = parse_system(config.at("system"));
    const TangentState s0 = parse_state(config.at("initial_state"), "initial_state");
    const std::vector<double> span = as_number_list(config.at("t_span"), "t_span");
    if (span.size() != 2 || !(span[1] > span[0]))
        throw ConfigError("t_span must be [t0, t1] with t1 > t0");
    const IntegratorConfig integ =
        parse_integrator(config.contains("integrator") ? config.at("integrator") : json());
    const double fd_step = get_number_or(config, "fd_step", 0.0);
    const auto files = parse_output(
        config.contains("output") ? config.at("output") : json(),
        {"el", "geodesic", "report"},
        {{"el", "el.csv"}, {"geodesic", "geodesic.csv"}, {"report", "compare.json"}});

    // Energy comes from the initial state of the Euler-Lagrange run.
    const double E = energy(spec.M, spec.V, s0);

    json resolved = base_echo("jacobi-compare", spec, ctx.seed, fd_step);
    resolved["initial_state"] = echo_state(s0);
    resolved["t_span"] = json::array({span[0], span[1]});
    resolved["integrator"] = echo_integrator(integ);
    resolved["energy"] = E;

    const Trajectory el = integrate_euler_lagrange(spec.M, spec.V, nullptr, {}, s0, span[0],
                                                   span[1], integ, fd_step);

    // Refuse runs that touch the Hill boundary anywhere on the path.
    for (const auto& s : el.states)
        if (E - spec.V(spec.chart.wrap(s.q)) < defaults::kJacobiEpsilon)
            throw HillBoundary("E - V fell below jacobi_epsilon along the trajectory");

    const MetricField G = jacobi_metric(spec.M, spec.V, E);

    // G-arclength of the EL path fixes the geodesic parameter span; the
    // geodesic starts in the same direction with unit G-norm velocity.
    double length = 0.0;
    std::vector<double> speeds(el.size());
    for (std::size_t k = 0; k < el.size(); ++k) {
        const auto& s = el.states[k];
        speeds[k] = std::sqrt(s.v.dot(metric_eval(G, s.q) * s.v));
        if (k > 0) length += 0.5 * (speeds[k] + speeds[k - 1]) * (el.tau[k] - el.tau[k - 1]);
    }
    const double v0norm = speeds.front();
    if (!(v0norm > 0.0)) throw ZeroSpeed("initial velocity has zero G-norm");

    TangentState g0{s0.q, s0.v / v0norm};
    IntegratorConfig geo_integ = integ;
    if (integ.scheme == IntegratorConfig::Scheme::Rk4)
        geo_integ.step = integ.step * length / (span[1] - span[0]);
    const Trajectory geo =
        integrate_geodesic(G, nullptr, {}, g0, 0.0, length, geo_integ, fd_step);

    const double distance = path_distance(el, geo, spec.chart);

    json report;
    report["path_distance"] = distance;
    report["E"] = E;
    report["steps"] = json{{"el", el.size()}, {"geodesic", geo.size()}};
    report["arc_length"] = length;
    report["config"] = resolved;

    write_file_atomic(ctx.out_dir, files.at("el"), trajectory_csv(el));
    write_file_atomic(ctx.out_dir, files.at("geodesic"), trajectory_csv(geo));
    write_file_atomic(ctx.out_dir, files.at("report"), report.dump(2) + "\n");
    return 0;
}

int cmd_match(const json& config, const RunContext& ctx) {
    check_keys(config, "config", {"system", "energy", "candidate", "sampler"},
               {"match_tol", "fd_step", "seed", "output", "round_trip"});
    const SystemSpec spec = parse_system(config.at("system"));
    const double E = as_number(config.at("energy"), "energy");
    const OpenLoopSystem sys = make_open_loop(spec, E);
    const MetricField G_cl = make_candidate(sys, config.at("candidate"));
    const StateSampler sampler = parse_sampler(config.at("sampler"), ctx.seed);
    const double tol = get_number_or(config, "match_tol", defaults::kMatchTol);
    const double fd_step = get_number_or(config, "fd_step", 0.0);
    const auto files = parse_output(config.contains("output") ? config.at("output") : json(),
                                    {"report"}, {{"report", "match.json"}});

    json resolved = base_echo("match", spec, ctx.seed, fd_step);
    resolved["energy"] = E;
    resolved["candidate"] = candidate_echo(config.at("candidate"));
    resolved["sampler"] = echo_sampler(sampler);
    resolved["match_tol"] = tol;

    const std::vector<TangentState> states = sample_states(sampler, sys);
    const MatchVerification v = verify_matching(sys, G_cl, states, tol, fd_step, ctx.threads);
    const MatchingReport worst = solve_pointwise_matching(sys, G_cl, v.worst, fd_step);

    json report;
    report["pass"] = v.pass;
    report["max_residual"] = v.max_residual;
    report["tol"] = tol;
    report["samples"] = v.samples;
    report["worst"] = json::parse(matching_report_json(worst));

    if (v.pass && config.contains("round_trip")) {
        const json& rt = config.at("round_trip");
        check_keys(rt, "round_trip", {"initial_state", "t_span"}, {"integrator"});
        const TangentState rt0 = parse_state(rt.at("initial_state"), "round_trip.initial_state");
        const std::vector<double> span = as_number_list(rt.at("t_span"), "round_trip.t_span");
        if (span.size() != 2 || !(span[1] > span[0]))
            throw ConfigError("round_trip.t_span must be [t0, t1] with t1 > t0");
        const IntegratorConfig integ =
            parse_integrator(rt.contains("integrator") ? rt.at("integrator") : json());

        const ControlLaw law = extract_control_law(sys, G_cl, sampler, tol, fd_step);
        const Trajectory forced = integrate_geodesic(sys.G_ol, &sys.frame, law.evaluator,
                                                     rt0, span[0], span[1], integ, fd_step);
        const Trajectory target =
            integrate_geodesic(G_cl, nullptr, {}, rt0, span[0], span[1], integ, fd_step);
        report["round_trip"] = json{{"path_distance", path_distance(forced, target, spec.chart)},
                                    {"t_span", json::array({span[0], span[1]})}};
        resolved["round_trip"] = json{{"initial_state", echo_state(rt0)},
                                      {"t_span", json::array({span[0], span[1]})},
                                      {"integrator", echo_integrator(integ)}};
    }

    report["config"] = resolved;
    write_file_atomic(ctx.out_dir, files.at("report"), report.dump(2) + "\n");
    return v.pass ? 0 : 1;
}

int cmd_stability(const json& config, const RunContext& ctx) {
    check_keys(config, "config", {"system", "grid"},
               {"metric", "energy", "velocity_samples", "fd_step", "seed", "output"});
    const SystemSpec spec = parse_system(config.at("system"));
    const std::string which =
        config.contains("metric") ? as_string(config.at("metric"), "metric") : "kinetic";
    if (which != "kinetic" && which != "jacobi")
        throw ConfigError("metric must be 'kinetic' or 'jacobi'");
    if (which == "jacobi" && !config.contains("energy"))
        throw ConfigError("jacobi metric needs 'energy'");
    const RegionGrid grid = parse_region_grid(config.at("grid"));
    const int vel_samples = get_int_or(config, "velocity_samples", 0);
    const double fd_step = get_number_or(config, "fd_step", 0.0);
    const auto files = parse_output(
        config.contains("output") ? config.at("output") : json(), {"map", "summary"},
        {{"map", "stability_map.csv"}, {"summary", "stability_summary.json"}});

    json resolved = base_echo("stability", spec, ctx.seed, fd_step);
    resolved["metric"] = which;
    if (config.contains("energy")) resolved["energy"] = as_number(config.at("energy"), "energy");
    resolved["grid"] = echo_region_grid(grid);
    resolved["velocity_samples"] = vel_samples;

    const MetricField G =
        which == "kinetic"
            ? spec.M
            : jacobi_metric(spec.M, spec.V, as_number(config.at("energy"), "energy"));

    const StabilityMap map = classify_region(G, grid, vel_samples, fd_step, ctx.threads);

    json summary = json::parse(stability_summary_json(map));
    summary["config"] = resolved;

    write_file_atomic(ctx.out_dir, files.at("map"), stability_map_csv(map, spec.chart));
    write_file_atomic(ctx.out_dir, files.at("summary"), summary.dump(2) + "\n");
    return 0;
}

int cmd_optimize(const json& config, const RunContext& ctx) {
    check_keys(config, "config",
               {"system", "energy", "family", "cost", "grid", "sampler", "budget"},
               {"weights", "fd_step", "seed", "output"});
    const SystemSpec spec = parse_system(config.at("system"));
    const double E = as_number(config.at("energy"), "energy");
    const OpenLoopSystem sys = make_open_loop(spec, E);

    const json& fam = config.at("family");
    check_keys(fam, "family", {"name", "bounds"}, {});
    const std::string fam_name = as_string(fam.at("name"), "family.name");
    if (fam_name != "conformal")
        throw ConfigError("family.name must be 'conformal' (richer families are library API)");
    const auto bounds = parse_region(fam.at("bounds"), "family.bounds");
    if (bounds.size() != 1) throw ConfigError("conformal family has exactly one parameter");

    MetricFamily family;
    family.param_dim = 1;
    family.bounds = bounds;
    const MetricField base = sys.G_ol;
    const Chart chart = sys.chart;
    family.instantiate = [base, chart](const Eigen::VectorXd& p) {
        const double lambda = p[0];
        MetricField::Fn value = [base, lambda](const Eigen::VectorXd& q) {
            return (lambda * base.raw(q)).eval();
        };
        if (base.has_derivative()) {
            MetricField::DerivFn deriv = [base, lambda](const Eigen::VectorXd& q) {
                Tensor3 d = base.analytic_derivative(q);
                const int n = d.dim();
                Tensor3 out(n);
                for (int k = 0; k < n; ++k)
                    for (int a = 0; a < n; ++a)
                        for (int b = 0; b < n; ++b) out(k, a, b) = lambda * d(k, a, b);
                return out;
            };
            return MetricField(chart, std::move(value), std::move(deriv));
        }
        return MetricField(chart, std::move(value));
    };

    const json& cost_j = config.at("cost");
    check_keys(cost_j, "cost", {},
               {"constant", "scalar", "scalar_sq", "riem_sq", "track_open_loop_scalar"});
    const double fd_step = get_number_or(config, "fd_step", 0.0);
    CostSpec spec_cost;
    spec_cost.constant = get_number_or(cost_j, "constant", 0.0);
    spec_cost.scalar = get_number_or(cost_j, "scalar", 0.0);
    spec_cost.scalar_sq = get_number_or(cost_j, "scalar_sq", 0.0);
    spec_cost.riem_sq = get_number_or(cost_j, "riem_sq", 0.0);
    spec_cost.track = get_number_or(cost_j, "track_open_loop_scalar", 0.0);
    if (spec_cost.track != 0.0) {
        const MetricField target = sys.G_ol;
        spec_cost.r_target = [target, fd_step](const Eigen::VectorXd& q) {
            return scalar_invariants(target, q, fd_step).R;
        };
    }
    if (!spec_cost.active()) throw ConfigError("cost needs at least one nonzero term");

    const QuadratureGrid grid = parse_quadrature_grid(config.at("grid"));
    const StateSampler sampler = parse_sampler(config.at("sampler"), ctx.seed);
    OptimizeWeights weights;
    if (config.contains("weights")) {
        check_keys(config.at("weights"), "weights", {}, {"mu_match"});
        weights.mu_match = get_number_or(config.at("weights"), "mu_match",
                                         defaults::kMatchPenalty);
    }
    const int budget = as_int(config.at("budget"), "budget");
    if (budget < 1) throw ConfigError("budget must be at least 1");
    const auto files = parse_output(config.contains("output") ? config.at("output") : json(),
                                    {"report", "history"},
                                    {{"report", "optimize.json"}, {"history", "history.csv"}});

    json resolved = base_echo("optimize", spec, ctx.seed, fd_step);
    resolved["energy"] = E;
    resolved["family"] = json{{"name", fam_name}, {"bounds", echo_region(bounds)}};
    resolved["cost"] = json{{"constant", spec_cost.constant},
                            {"scalar", spec_cost.scalar},
                            {"scalar_sq", spec_cost.scalar_sq},
                            {"riem_sq", spec_cost.riem_sq},
                            {"track_open_loop_scalar", spec_cost.track}};
    resolved["grid"] = echo_quadrature_grid(grid);
    resolved["sampler"] = echo_sampler(sampler);
    resolved["weights"] = json{{"mu_match", weights.mu_match}};
    resolved["budget"] = budget;

    const OptimizeResult result = constrained_optimize(family, sys, spec_cost, grid, sampler,
                                                       weights, budget, ctx.seed, fd_step);

    json report;
    report["best_params"] =
        std::vector<double>(result.best_params.begin(), result.best_params.end());
    report["best_cost"] = result.best_cost;
    report["max_residual"] = result.max_residual;
    report["evaluations"] = result.evaluations;
    report["seed"] = result.seed;
    report["config"] = resolved;

    write_file_atomic(ctx.out_dir, files.at("report"), report.dump(2) + "\n");
    write_file_atomic(ctx.out_dir, files.at("history"), history_csv(result));
    return 0;
}

}  // namespace geoctl::cli
