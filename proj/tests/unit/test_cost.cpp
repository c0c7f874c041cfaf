#include <doctest.h>

#include <cmath>
#include <numbers>

#include <geoctl/cost.hpp>
#include <geoctl/errors.hpp>
#include <geoctl/geometry.hpp>
#include <geoctl/systems.hpp>

using namespace geoctl;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::VectorXd vec2(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
}

}  // namespace

TEST_CASE("scalar invariants on catalog metrics") {
    const SystemSpec flat_sys = get_system("flat_free");
    const ScalarInvariants zero = scalar_invariants(flat_sys.M, vec2(0.3, 0.7));
    CHECK(std::abs(zero.R) < 1e-9);
    CHECK(std::abs(zero.riem2) < 1e-9);

    const SystemSpec sph = get_system("sphere");
    const ScalarInvariants s1 = scalar_invariants(sph.M, vec2(1.1, 0.4));
    CHECK(s1.R == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(s1.riem2 == doctest::Approx(4.0).epsilon(1e-6));

    const SystemSpec sph2 = get_system("sphere", {{"radius", 2.0}});
    const ScalarInvariants s2 = scalar_invariants(sph2.M, vec2(1.1, 0.4));
    CHECK(s2.R == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(s2.riem2 == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("volume quadrature: flat unit square and sphere band") {
    SUBCASE("unit square") {
        const SystemSpec flat_sys = get_system("flat_free");
        CostSpec spec;
        spec.constant = 1.0;
        QuadratureGrid grid;
        grid.region = {{0.0, 1.0}, {0.0, 1.0}};
        grid.counts = {11, 11};
        CHECK(cost_evaluate(spec, flat_sys.M, grid) == doctest::Approx(1.0).epsilon(1e-12));

        grid.rule = QuadratureGrid::Rule::Midpoint;
        CHECK(cost_evaluate(spec, flat_sys.M, grid) == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("sphere band area approaches 4 pi") {
        const SystemSpec sph = get_system("sphere");
        const double delta = 1e-3;
        CostSpec spec;
        spec.constant = 1.0;
        QuadratureGrid grid;
        grid.region = {{delta, kPi - delta}, {0.0, 2.0 * kPi}};
        grid.counts = {801, 25};
        const double area = cost_evaluate(spec, sph.M, grid);
        const double exact = 4.0 * kPi * std::cos(delta);
        CHECK(std::abs(area - exact) / exact < 1e-5);
        CHECK(std::abs(area - 4.0 * kPi) / (4.0 * kPi) < 1e-3);
    }
}

TEST_CASE("curvature integral over the sphere band doubles the area") {
    const SystemSpec sph = get_system("sphere");
    const double delta = 1e-2;
    QuadratureGrid grid;
    grid.region = {{delta, kPi - delta}, {0.0, 2.0 * kPi}};
    grid.counts = {401, 13};

    CostSpec area_spec;
    area_spec.constant = 1.0;
    const double area = cost_evaluate(area_spec, sph.M, grid);

    CostSpec r_spec;
    r_spec.scalar = 1.0;
    const double total = cost_evaluate(r_spec, sph.M, grid);
    CHECK(std::abs(total - 2.0 * area) / (2.0 * area) < 1e-2);

    // Shrinking caps pushes the integral toward the closed-surface value.
    // The coarse cap at delta = 0.1 loses ~8 pi delta^2 / 2 of area, well
    // above the near-pole curvature noise of the finer band.
    QuadratureGrid coarse = grid;
    coarse.region = {{0.1, kPi - 0.1}, {0.0, 2.0 * kPi}};
    coarse.counts = {201, 13};
    const double total_coarse = cost_evaluate(r_spec, sph.M, coarse);
    CHECK(std::abs(total - 8.0 * kPi) < std::abs(total_coarse - 8.0 * kPi));
    CHECK(std::abs(total - 8.0 * kPi) / (8.0 * kPi) < 1e-2);
}

TEST_CASE("quadrature error falls at the rule's order under refinement") {
    const SystemSpec sph = get_system("sphere");
    const double delta = 0.2;
    CostSpec spec;
    spec.constant = 1.0;
    const double exact = 2.0 * kPi * 2.0 * std::cos(delta);

    for (const auto rule : {QuadratureGrid::Rule::Trapezoid, QuadratureGrid::Rule::Midpoint}) {
        auto error_at = [&](int n_theta) {
            QuadratureGrid grid;
            grid.rule = rule;
            grid.region = {{delta, kPi - delta}, {0.0, 2.0 * kPi}};
            grid.counts = {n_theta, 9};
            return std::abs(cost_evaluate(spec, sph.M, grid) - exact);
        };
        const double e1 = error_at(rule == QuadratureGrid::Rule::Trapezoid ? 21 : 20);
        const double e2 = error_at(rule == QuadratureGrid::Rule::Trapezoid ? 41 : 40);
        // Both rules are second order: doubling nodes cuts the error ~4x.
        CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.3));
    }
}

TEST_CASE("cost is invariant under constant axis rescaling") {
    const SystemSpec neg = get_system("neg_curv_patch");
    CostSpec spec;
    spec.constant = 0.5;
    spec.scalar_sq = 1.0;
    spec.riem_sq = 0.25;

    QuadratureGrid grid;
    grid.region = {{-0.4, 0.4}, {-0.4, 0.4}};
    grid.counts = {17, 17};
    const double base_value = cost_evaluate(spec, neg.M, grid);

    const Eigen::Vector2d c(2.0, 0.5);
    Chart plane = Chart::unbounded({"s1", "s2"});
    const MetricField base = neg.M;
    MetricField rescaled(plane, [base, c](const Eigen::VectorXd& qs) {
        Eigen::VectorXd q(2);
        q << qs[0] / c[0], qs[1] / c[1];
        Eigen::MatrixXd g = base.raw(q);
        Eigen::MatrixXd out(2, 2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) out(i, j) = g(i, j) / (c[i] * c[j]);
        return out;
    });
    QuadratureGrid scaled_grid;
    scaled_grid.region = {{-0.4 * c[0], 0.4 * c[0]}, {-0.4 * c[1], 0.4 * c[1]}};
    scaled_grid.counts = {17, 17};
    const double scaled_value = cost_evaluate(spec, rescaled, scaled_grid);
    CHECK(scaled_value == doctest::Approx(base_value).epsilon(1e-6));
}

TEST_CASE("degenerate nodes and empty specs are rejected") {
    const SystemSpec sph = get_system("sphere");
    CostSpec spec;
    spec.constant = 1.0;
    QuadratureGrid touches_pole;
    touches_pole.region = {{0.0, 1.0}, {0.0, 1.0}};
    touches_pole.counts = {5, 5};
    CHECK_THROWS_AS((void)cost_evaluate(spec, sph.M, touches_pole), DegenerateMetric);

    CostSpec empty;
    QuadratureGrid grid;
    grid.region = {{0.5, 1.0}, {0.0, 1.0}};
    grid.counts = {3, 3};
    CHECK_THROWS_AS((void)cost_evaluate(empty, sph.M, grid), Error);

    CostSpec track_only;
    track_only.track = 1.0;  // no target profile supplied
    CHECK_THROWS_AS((void)cost_evaluate(track_only, sph.M, grid), Error);
}
