#include <doctest.h>

#include <cmath>
#include <numbers>

#include <json.hpp>

#include <geoctl/defaults.hpp>
#include <geoctl/dynamics.hpp>
#include <geoctl/errors.hpp>
#include <geoctl/geometry.hpp>
#include <geoctl/shaping.hpp>
#include <geoctl/systems.hpp>

#include "oracles.hpp"

using namespace geoctl;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::VectorXd vec2(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
}

// Varying conformal rescaling of a base metric; changes the connection.
MetricField scaled_metric(const MetricField& base,
                          std::function<double(const Eigen::VectorXd&)> factor) {
    return MetricField(base.chart(), [base, factor](const Eigen::VectorXd& q) {
        return (factor(q) * base.raw(q)).eval();
    });
}

// Constant rescaling; keeps the analytic derivative so both connections are
// evaluated through the same exact path.
MetricField conformal_metric(const MetricField& base, double lambda) {
    MetricField::Fn value = [base, lambda](const Eigen::VectorXd& q) {
        return (lambda * base.raw(q)).eval();
    };
    if (!base.has_derivative()) return MetricField(base.chart(), std::move(value));
    MetricField::DerivFn deriv = [base, lambda](const Eigen::VectorXd& q) {
        Tensor3 d = base.analytic_derivative(q);
        const int n = d.dim();
        Tensor3 out(n);
        for (int k = 0; k < n; ++k)
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) out(k, a, b) = lambda * d(k, a, b);
        return out;
    };
    return MetricField(base.chart(), std::move(value), std::move(deriv));
}

// Base metric plus a Gaussian bump on the last diagonal entry.
MetricField bumped_metric(const MetricField& base, double amplitude, double width,
                          const Eigen::VectorXd& center) {
    return MetricField(base.chart(), [base, amplitude, width, center](const Eigen::VectorXd& q) {
        Eigen::MatrixXd g = base.raw(q);
        const Eigen::VectorXd qw = base.chart().wrap(q);
        g(g.rows() - 1, g.cols() - 1) +=
            amplitude * std::exp(-(qw - center).squaredNorm() / (width * width));
        return g;
    });
}

}  // namespace

TEST_CASE("jacobi_metric direct substitutions") {
    SUBCASE("free particle at E = 1/2 is the identity") {
        const SystemSpec sys = get_system("flat_free");
        const MetricField G = jacobi_metric(sys.M, sys.V, 0.5);
        CHECK(metric_eval(G, vec2(3.0, -1.0)).isApprox(Eigen::Matrix2d::Identity(), 1e-14));
    }

    SUBCASE("1d quadratic potential at the origin") {
        Chart line = Chart::unbounded({"q"});
        MetricField M = MetricField::constant(line, Eigen::MatrixXd::Identity(1, 1));
        ScalarField V([](const Eigen::VectorXd& q) { return 0.5 * q[0] * q[0]; });
        const MetricField G = jacobi_metric(M, V, 1.0);
        CHECK(metric_eval(G, Eigen::VectorXd::Zero(1))(0, 0) == doctest::Approx(2.0));
    }

    SUBCASE("pendulum at the Hill boundary") {
        const SystemSpec pend = get_system("pendulum");
        const double E = 2.0 * pend.params.at("m") * pend.params.at("g") * pend.params.at("l");
        const MetricField G = jacobi_metric(pend.M, pend.V, E);
        CHECK_THROWS_AS((void)metric_eval(G, Eigen::VectorXd::Constant(1, kPi)), HillBoundary);
        // Slightly inside the Hill region the metric is fine.
        CHECK_NOTHROW((void)metric_eval(G, Eigen::VectorXd::Constant(1, 2.0)));
    }
}

TEST_CASE("connection_difference zero cases and conformal oracle") {
    const SystemSpec h2 = get_system("harmonic2d");
    const MetricField G_ol = jacobi_metric(h2.M, h2.V, 2.0);

    SUBCASE("identical metrics give exactly zero") {
        const Eigen::VectorXd d =
            connection_difference(G_ol, G_ol, {vec2(0.3, 0.4), vec2(1.0, -2.0)});
        CHECK(d.cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("zero velocity gives exactly zero") {
        const MetricField G_cl = scaled_metric(
            G_ol, [](const Eigen::VectorXd& q) { return 1.0 + 0.3 * std::sin(q[0]); });
        const Eigen::VectorXd d =
            connection_difference(G_cl, G_ol, {vec2(0.3, 0.4), vec2(0.0, 0.0)});
        CHECK(d.cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("conformally flat closed form") {
        Chart plane = Chart::unbounded({"q1", "q2"});
        const MetricField flat_m = MetricField::constant(plane, Eigen::Matrix2d::Identity());
        const MetricField conf(plane, [](const Eigen::VectorXd& q) {
            return (std::exp(2.0 * q[0]) * Eigen::Matrix2d::Identity()).eval();
        });
        // Gamma of e^{2 q1} I: O(1) entries built from the gradient of q1.
        const Eigen::VectorXd q = vec2(0.0, 0.0);
        const Eigen::VectorXd d10 =
            connection_difference(conf, flat_m, {q, vec2(1.0, 0.0)});
        CHECK(d10[0] == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(d10[1] == doctest::Approx(0.0).epsilon(1e-8));
        const Eigen::VectorXd d01 =
            connection_difference(conf, flat_m, {q, vec2(0.0, 1.0)});
        CHECK(d01[0] == doctest::Approx(-1.0).epsilon(1e-8));
        CHECK(d01[1] == doctest::Approx(0.0).epsilon(1e-8));
        const Eigen::VectorXd d11 =
            connection_difference(conf, flat_m, {q, vec2(1.0, 1.0)});
        CHECK(d11[0] == doctest::Approx(0.0).epsilon(1e-8));
        CHECK(d11[1] == doctest::Approx(2.0).epsilon(1e-8));
    }
}

TEST_CASE("connection_difference transforms as a vector under axis rescaling") {
    const SystemSpec h2 = get_system("harmonic2d");
    const MetricField G_ol = jacobi_metric(h2.M, h2.V, 2.0);
    const MetricField G_cl = scaled_metric(
        G_ol, [](const Eigen::VectorXd& q) { return 1.0 + 0.2 * std::sin(q[0] + q[1]); });

    const Eigen::Vector2d c(2.0, 0.5);
    Chart plane = Chart::unbounded({"s1", "s2"});
    auto rescale = [&](const MetricField& base) {
        return MetricField(plane, [base, c](const Eigen::VectorXd& qs) {
            Eigen::VectorXd q(2);
            q << qs[0] / c[0], qs[1] / c[1];
            Eigen::MatrixXd g = base.raw(q);
            Eigen::MatrixXd out(2, 2);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) out(i, j) = g(i, j) / (c[i] * c[j]);
            return out;
        });
    };
    const MetricField G_ol_s = rescale(G_ol);
    const MetricField G_cl_s = rescale(G_cl);

    const Eigen::VectorXd q = vec2(0.3, -0.2);
    const Eigen::VectorXd v = vec2(0.7, 0.4);
    const Eigen::VectorXd d = connection_difference(G_cl, G_ol, {q, v});

    Eigen::VectorXd qs(2), vs(2);
    qs << c[0] * q[0], c[1] * q[1];
    vs << c[0] * v[0], c[1] * v[1];
    const Eigen::VectorXd ds = connection_difference(G_cl_s, G_ol_s, {qs, vs});

    for (int k = 0; k < 2; ++k)
        CHECK(ds[k] == doctest::Approx(c[k] * d[k]).epsilon(5e-6));
}

TEST_CASE("pointwise matching identities") {
    const SystemSpec h2 = get_system("harmonic2d");
    const OpenLoopSystem sys = make_open_loop(h2, 2.0);

    SUBCASE("full actuation absorbs any candidate") {
        const MetricField G_cl = scaled_metric(
            sys.G_ol, [](const Eigen::VectorXd& q) { return 1.0 + 0.25 * std::cos(q[1]); });
        std::mt19937_64 rng(7);
        for (int trial = 0; trial < 100; ++trial) {
            const TangentState s{oracle::uniform_vector(rng, 2, -1.0, 1.0),
                                 oracle::uniform_vector(rng, 2, -2.0, 2.0)};
            const MatchingReport rep = solve_pointwise_matching(sys, G_cl, s);
            CHECK(rep.residual_norm <= 1e-12);
        }
    }

    SUBCASE("identical metrics give a zero law") {
        std::mt19937_64 rng(9);
        for (int trial = 0; trial < 20; ++trial) {
            const TangentState s{oracle::uniform_vector(rng, 2, -1.0, 1.0),
                                 oracle::uniform_vector(rng, 2, -2.0, 2.0)};
            const MatchingReport rep = solve_pointwise_matching(sys, sys.G_ol, s);
            CHECK(rep.u_coeffs.cwiseAbs().maxCoeff() <= 1e-12);
            CHECK(rep.residual_norm <= 1e-12);
        }
    }
}

TEST_CASE("under-actuated matching on the cart pendulum") {
    const SystemSpec cp = get_system("cart_pendulum");
    const OpenLoopSystem sys = make_open_loop(cp, 1.5);

    SUBCASE("constant conformal candidates match with zero input") {
        // A constant rescaling leaves the Levi-Civita connection unchanged.
        const MetricField G_cl =
            conformal_metric(sys.G_ol, 1.7);
        std::mt19937_64 rng(13);
        for (int trial = 0; trial < 50; ++trial) {
            Eigen::VectorXd q(2), v(2);
            q << oracle::uniform(rng, -1.0, 1.0), oracle::uniform(rng, -3.0, 3.0);
            v << oracle::uniform(rng, -2.0, 2.0), oracle::uniform(rng, -2.0, 2.0);
            const MatchingReport rep = solve_pointwise_matching(sys, G_cl, {q, v});
            CHECK(rep.residual_norm <= 1e-10);
            CHECK(rep.u_coeffs.cwiseAbs().maxCoeff() <= 1e-10);
        }
    }

    SUBCASE("residual is G_ol-orthogonal to the actuation span") {
        const MetricField G_cl = bumped_metric(sys.G_ol, 0.4, 0.6, vec2(0.0, 2.0));
        std::mt19937_64 rng(15);
        bool saw_nonzero = false;
        for (int trial = 0; trial < 30; ++trial) {
            Eigen::VectorXd q(2), v(2);
            q << oracle::uniform(rng, -1.0, 1.0), oracle::uniform(rng, 1.0, 3.0);
            v << oracle::uniform(rng, -2.0, 2.0), oracle::uniform(rng, -2.0, 2.0);
            const MatchingReport rep = solve_pointwise_matching(sys, G_cl, {q, v});
            const Eigen::MatrixXd e = sys.frame.evaluate(q);
            const Eigen::MatrixXd g = metric_eval(sys.G_ol, q);
            const Eigen::VectorXd overlap = e.transpose() * g * rep.residual_vector;
            CHECK(overlap.cwiseAbs().maxCoeff() < 1e-10);
            if (rep.residual_norm > 1e-6) saw_nonzero = true;
        }
        CHECK(saw_nonzero);
    }

    SUBCASE("input coefficients are quadratic in the velocity") {
        const MetricField G_cl = bumped_metric(sys.G_ol, 0.4, 0.6, vec2(0.0, 2.0));
        std::mt19937_64 rng(19);
        for (int trial = 0; trial < 20; ++trial) {
            Eigen::VectorXd q(2), v(2);
            q << oracle::uniform(rng, -1.0, 1.0), oracle::uniform(rng, -3.0, 3.0);
            v << oracle::uniform(rng, -2.0, 2.0), oracle::uniform(rng, -2.0, 2.0);
            const MatchingReport r1 = solve_pointwise_matching(sys, G_cl, {q, v});
            const MatchingReport r2 = solve_pointwise_matching(sys, G_cl, {q, (2.0 * v).eval()});
            CHECK((r2.u_coeffs - 4.0 * r1.u_coeffs).cwiseAbs().maxCoeff() <
                  1e-9 * std::max(1.0, r1.u_coeffs.cwiseAbs().maxCoeff()));
            CHECK(std::abs(r2.residual_norm - 4.0 * r1.residual_norm) <
                  1e-9 * std::max(1.0, r1.residual_norm));
        }
    }
}

TEST_CASE("verify_matching and the negative control") {
    const SystemSpec cp = get_system("cart_pendulum");
    const OpenLoopSystem sys = make_open_loop(cp, 1.5);
    StateSampler sampler;
    sampler.region = {{-1.0, 1.0}, {-3.1, 3.1}};
    sampler.count = 100;
    sampler.seed = 3;

    SUBCASE("conformal candidate passes") {
        const MetricField G_cl =
            conformal_metric(sys.G_ol, 1.7);
        const MatchVerification v = verify_matching(sys, G_cl, sampler, 1e-10);
        CHECK(v.pass);
        CHECK(v.max_residual <= 1e-10);
        CHECK(v.samples == 100);
    }

    SUBCASE("bumped candidate fails and extraction refuses it") {
        const MetricField G_cl = bumped_metric(sys.G_ol, 0.4, 0.6, vec2(0.0, 2.0));
        const MatchVerification v = verify_matching(sys, G_cl, sampler, defaults::kMatchTol);
        CHECK_FALSE(v.pass);
        CHECK(v.max_residual > defaults::kMatchTol);
        CHECK_THROWS_AS((void)extract_control_law(sys, G_cl, sampler, defaults::kMatchTol),
                        MatchingFailed);
    }

    SUBCASE("threaded evaluation agrees with serial") {
        const MetricField G_cl = bumped_metric(sys.G_ol, 0.4, 0.6, vec2(0.0, 2.0));
        const MatchVerification serial = verify_matching(sys, G_cl, sampler, 1e-8, 0.0, 1);
        const MatchVerification threaded = verify_matching(sys, G_cl, sampler, 1e-8, 0.0, 4);
        CHECK(serial.max_residual == threaded.max_residual);
        CHECK((serial.worst.q - threaded.worst.q).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("extracted law reproduces closed-loop geodesics") {
    const SystemSpec h2 = get_system("harmonic2d");
    const OpenLoopSystem sys = make_open_loop(h2, 1.0);
    const MetricField G_cl =
        MetricField::constant(h2.chart, Eigen::Matrix2d::Identity());

    StateSampler sampler;
    sampler.region = {{-0.4, 0.4}, {-0.4, 0.4}};
    sampler.count = 50;
    sampler.seed = 5;
    const ControlLaw law = extract_control_law(sys, G_cl, sampler, defaults::kMatchTol);

    IntegratorConfig cfg;
    cfg.step = 1e-3;
    const TangentState s0{vec2(0.3, 0.1), vec2(0.2, -0.1)};
    const Trajectory forced =
        integrate_geodesic(sys.G_ol, &sys.frame, law.evaluator, s0, 0.0, 1.0, cfg);
    const Trajectory target = integrate_geodesic(G_cl, nullptr, {}, s0, 0.0, 1.0, cfg);
    CHECK(path_distance(forced, target, h2.chart) < 1e-4);

    // Flat-metric geodesics in these coordinates are straight lines.
    const Eigen::VectorXd end = forced.back().q;
    CHECK((end - (s0.q + 1.0 * s0.v)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("state sampling is deterministic and respects the Hill bound") {
    const SystemSpec cp = get_system("cart_pendulum");
    // Low energy: only part of the theta range is admissible.
    const OpenLoopSystem sys = make_open_loop(cp, -0.2);
    StateSampler sampler;
    sampler.region = {{-1.0, 1.0}, {-3.1, 3.1}};
    sampler.count = 60;
    sampler.seed = 21;
    const auto a = sample_states(sampler, sys);
    const auto b = sample_states(sampler, sys);
    REQUIRE(a.size() == 60);
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK((a[k].q - b[k].q).cwiseAbs().maxCoeff() == 0.0);
        CHECK((a[k].v - b[k].v).cwiseAbs().maxCoeff() == 0.0);
        CHECK(sys.E - cp.V(a[k].q) >= defaults::kJacobiEpsilon);
    }
}

TEST_CASE("matching report serializes with the documented keys") {
    const SystemSpec cp = get_system("cart_pendulum");
    const OpenLoopSystem sys = make_open_loop(cp, 1.5);
    const MatchingReport rep =
        solve_pointwise_matching(sys, sys.G_ol, {vec2(0.1, 0.2), vec2(0.5, -0.5)});
    const auto j = nlohmann::json::parse(matching_report_json(rep));
    for (const char* key : {"u_coeffs", "residual_vector", "residual_norm", "condition",
                            "point", "velocity"})
        CHECK(j.contains(key));
    CHECK(j["u_coeffs"].is_array());
    CHECK(j["point"].size() == 2);
}

TEST_CASE("off-shell states are flagged") {
    const SystemSpec h2 = get_system("harmonic2d");
    const OpenLoopSystem sys = make_open_loop(h2, 1.0);
    // V = 0.4 and T = 0.6 at this state, so it sits on the E = 1 shell.
    const TangentState on{vec2(std::sqrt(0.8), 0.0), vec2(0.0, std::sqrt(1.2))};
    const TangentState off{vec2(0.1, 0.0), vec2(3.0, 0.0)};
    CHECK_FALSE(solve_pointwise_matching(sys, sys.G_ol, on).off_shell);
    CHECK(solve_pointwise_matching(sys, sys.G_ol, off).off_shell);
}
