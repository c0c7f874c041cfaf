#include <doctest.h>

#include <cmath>
#include <numbers>

#include <geoctl/errors.hpp>
#include <geoctl/geometry.hpp>
#include <geoctl/systems.hpp>

#include "oracles.hpp"

using namespace geoctl;

TEST_CASE("catalog listing and lookup") {
    const auto names = list_systems();
    CHECK(names.size() == 6);
    for (const auto& name : names) CHECK_NOTHROW((void)get_system(name));
    CHECK_THROWS_AS((void)get_system("acrobot"), UnknownSystem);
    CHECK_THROWS_AS((void)get_system("pendulum", {{"mass", 2.0}}), UnknownSystem);
}

TEST_CASE("flat_free metric is exactly the identity") {
    const SystemSpec sys = get_system("flat_free");
    Eigen::VectorXd q(2);
    q << 17.0, -4.2;
    const Eigen::MatrixXd g = metric_eval(sys.M, q);
    CHECK(g(0, 0) == 1.0);
    CHECK(g(1, 1) == 1.0);
    CHECK(g(0, 1) == 0.0);
}

TEST_CASE("cart_pendulum mass matrix") {
    const SystemSpec cp = get_system("cart_pendulum");
    const double mc = cp.params.at("m_c"), mp = cp.params.at("m_p"), l = cp.params.at("l");

    SUBCASE("off-diagonal vanishes at theta = pi/2") {
        Eigen::VectorXd q(2);
        q << 0.0, 0.5 * std::numbers::pi;
        const Eigen::MatrixXd g = metric_eval(cp.M, q);
        CHECK(std::abs(g(0, 1)) < 1e-15);
    }

    SUBCASE("positive definite for all theta, determinant bounded below") {
        const double ref = cp.reference_data.at("det_M_min").value;
        CHECK(ref == doctest::Approx(mp * l * l * mc));
        for (int k = 0; k < 64; ++k) {
            Eigen::VectorXd q(2);
            q << 0.3, -std::numbers::pi + 2.0 * std::numbers::pi * k / 64.0;
            const Eigen::MatrixXd g = metric_eval(cp.M, q);
            const double det = g.determinant();
            CHECK(det >= ref - 1e-12);
            CHECK(det == doctest::Approx(mp * l * l *
                                         (mc + mp * std::sin(q[1]) * std::sin(q[1])))
                             .epsilon(1e-12));
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
            CHECK(es.eigenvalues().minCoeff() > 0.0);
        }
    }
}

TEST_CASE("catalog analytic derivatives agree with finite differences at O(h^2)") {
    std::mt19937_64 rng(41);
    for (const auto& name : list_systems()) {
        const SystemSpec sys = get_system(name);
        REQUIRE(sys.M.has_derivative());
        // Strip the hook to force the finite-difference path.
        const MetricField fd_only(sys.chart,
                                  [&sys](const Eigen::VectorXd& q) { return sys.M.raw(q); });
        for (int trial = 0; trial < 5; ++trial) {
            Eigen::VectorXd q(sys.chart.dim());
            for (int i = 0; i < q.size(); ++i) {
                const double lo = std::isfinite(sys.chart.lower()[i])
                                      ? sys.chart.lower()[i] + 0.3
                                      : -1.5;
                const double hi = std::isfinite(sys.chart.upper()[i])
                                      ? sys.chart.upper()[i] - 0.3
                                      : 1.5;
                q[i] = oracle::uniform(rng, lo, hi);
            }
            const Tensor3 exact = metric_derivative(sys.M, q);
            auto max_diff = [&](double h) {
                const Tensor3 fd = metric_derivative(fd_only, q, h);
                double worst = 0.0;
                const int n = sys.chart.dim();
                for (int k = 0; k < n; ++k)
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j)
                            worst = std::max(worst, std::abs(fd(k, i, j) - exact(k, i, j)));
                return worst;
            };
            const double e1 = max_diff(1e-3);
            const double e2 = max_diff(5e-4);
            if (e1 < 1e-13) {
                CHECK(e2 < 1e-13);  // constant metric: both differences vanish
            } else {
                CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.4));
            }
        }
    }
}

TEST_CASE("catalog curvature oracles") {
    const SystemSpec sph = get_system("sphere");
    const double K_sph = sph.reference_data.at("sectional_curvature").value;
    Eigen::VectorXd q(2);
    q << 1.0, 2.0;
    CHECK(std::abs(sectional_curvature(sph.M, q, Eigen::Vector2d(1, 0),
                                       Eigen::Vector2d(0, 1)) -
                   K_sph) < 1e-6);

    const SystemSpec neg = get_system("neg_curv_patch");
    const double K_neg = neg.reference_data.at("sectional_curvature").value;
    Eigen::VectorXd p(2);
    p << 0.3, -0.4;
    CHECK(std::abs(sectional_curvature(neg.M, p, Eigen::Vector2d(1, 0),
                                       Eigen::Vector2d(0, 1)) -
                   K_neg) < 1e-6);
}

TEST_CASE("parameter overrides rebuild the system") {
    const SystemSpec sph2 = get_system("sphere", {{"radius", 2.0}});
    CHECK(sph2.reference_data.at("sectional_curvature").value == doctest::Approx(0.25));
    Eigen::VectorXd q(2);
    q << 1.2, 0.1;
    const Eigen::MatrixXd g = metric_eval(sph2.M, q);
    CHECK(g(0, 0) == doctest::Approx(4.0));

    const SystemSpec pend = get_system("pendulum", {{"l", 2.0}});
    CHECK(pend.reference_data.at("small_oscillation_period").value ==
          doctest::Approx(2.0 * std::numbers::pi * std::sqrt(2.0 / 9.81)));
}
