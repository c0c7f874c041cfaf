#include "geoctl/systems.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "geoctl/errors.hpp"

namespace geoctl {

namespace {

constexpr double kPi = std::numbers::pi;

Chart angle_chart(const std::string& name) {
    return Chart({name}, Eigen::VectorXd::Constant(1, -kPi),
                 Eigen::VectorXd::Constant(1, kPi), {true});
}

double param(const std::map<std::string, double>& p, const std::string& key) {
    return p.at(key);
}

std::map<std::string, double> merge_params(const std::map<std::string, double>& defaults,
                                           const std::map<std::string, double>& overrides,
                                           const std::string& system) {
    std::map<std::string, double> out = defaults;
    for (const auto& [key, value] : overrides) {
        auto it = out.find(key);
        if (it == out.end())
            throw UnknownSystem("system '" + system + "' has no parameter '" + key + "'");
        it->second = value;
    }
    return out;
}

SystemSpec make_flat_free(const std::map<std::string, double>& p) {
    Chart chart = Chart::unbounded({"q1", "q2"});
    return SystemSpec{"flat_free",
                      chart,
                      MetricField::constant(chart, Eigen::Matrix2d::Identity()),
                      ScalarField::zero(),
                      ActuationFrame::coordinate_basis(2),
                      p,
                      {}};
}

SystemSpec make_harmonic2d(const std::map<std::string, double>& p) {
    Chart chart = Chart::unbounded({"q1", "q2"});
    const double k = param(p, "k");
    ScalarField V([k](const Eigen::VectorXd& q) { return 0.5 * k * q.squaredNorm(); },
                  [k](const Eigen::VectorXd& q) { return (k * q).eval(); });
    return SystemSpec{"harmonic2d",
                      chart,
                      MetricField::constant(chart, Eigen::Matrix2d::Identity()),
                      V,
                      ActuationFrame::coordinate_basis(2),
                      p,
                      {{"potential_min", {0.0, RefTag::Trivial}}}};
}

SystemSpec make_pendulum(const std::map<std::string, double>& p) {
    Chart chart = angle_chart("theta");
    const double m = param(p, "m"), l = param(p, "l"), g = param(p, "g");
    MetricField M = MetricField::constant(chart, Eigen::MatrixXd::Constant(1, 1, m * l * l));
    ScalarField V(
        [m, l, g](const Eigen::VectorXd& q) { return m * g * l * (1.0 - std::cos(q[0])); },
        [m, l, g](const Eigen::VectorXd& q) {
            return Eigen::VectorXd::Constant(1, m * g * l * std::sin(q[0])).eval();
        });
    return SystemSpec{
        "pendulum",
        chart,
        M,
        V,
        ActuationFrame::coordinate_basis(1),
        p,
        {{"small_oscillation_period", {2.0 * kPi * std::sqrt(l / g), RefTag::Derived}}}};
}

SystemSpec make_cart_pendulum(const std::map<std::string, double>& p) {
    const double inf = std::numeric_limits<double>::infinity();
    Eigen::VectorXd lower(2), upper(2);
    lower << -inf, -kPi;
    upper << inf, kPi;
    Chart chart({"x", "theta"}, lower, upper, {false, true});

    const double mc = param(p, "m_c"), mp = param(p, "m_p"), l = param(p, "l"),
                 g = param(p, "g");
    MetricField M(
        chart,
        [mc, mp, l](const Eigen::VectorXd& q) {
            const double c = std::cos(q[1]);
            Eigen::Matrix2d m;
            m << mc + mp, mp * l * c, mp * l * c, mp * l * l;
            return Eigen::MatrixXd(m);
        },
        [mp, l](const Eigen::VectorXd& q) {
            const double s = std::sin(q[1]);
            Tensor3 d(2);
            d(1, 0, 1) = -mp * l * s;
            d(1, 1, 0) = -mp * l * s;
            return d;
        });
    // theta = 0 is the upright configuration.
    ScalarField V(
        [mp, g, l](const Eigen::VectorXd& q) { return mp * g * l * std::cos(q[1]); },
        [mp, g, l](const Eigen::VectorXd& q) {
            Eigen::VectorXd grad(2);
            grad << 0.0, -mp * g * l * std::sin(q[1]);
            return grad;
        });
    return SystemSpec{
        "cart_pendulum",
        chart,
        M,
        V,
        ActuationFrame::coordinate_axes(2, {0}),  // cart direction only
        p,
        {{"det_M_min", {mp * l * l * mc, RefTag::Derived}},
         {"potential_max", {mp * g * l, RefTag::Trivial}}}};
}

SystemSpec make_sphere(const std::map<std::string, double>& p) {
    Eigen::VectorXd lower(2), upper(2);
    lower << 0.0, 0.0;
    upper << kPi, 2.0 * kPi;
    Chart chart({"theta", "phi"}, lower, upper, {false, true});

    const double r = param(p, "radius");
    const double r2 = r * r;
    MetricField G(
        chart,
        [r2](const Eigen::VectorXd& q) {
            const double s = std::sin(q[0]);
            Eigen::Matrix2d g;
            g << r2, 0.0, 0.0, r2 * s * s;
            return Eigen::MatrixXd(g);
        },
        [r2](const Eigen::VectorXd& q) {
            Tensor3 d(2);
            d(0, 1, 1) = 2.0 * r2 * std::sin(q[0]) * std::cos(q[0]);
            return d;
        });
    return SystemSpec{"sphere",
                      chart,
                      G,
                      ScalarField::zero(),
                      ActuationFrame::coordinate_basis(2),
                      p,
                      {{"sectional_curvature", {1.0 / r2, RefTag::Derived}},
                       {"scalar_curvature", {2.0 / r2, RefTag::Derived}}}};
}

SystemSpec make_neg_curv_patch(const std::map<std::string, double>& p) {
    Chart chart = Chart::unbounded({"q1", "q2"});
    MetricField G(
        chart,
        [](const Eigen::VectorXd& q) {
            Eigen::Matrix2d g;
            g << 1.0, 0.0, 0.0, std::exp(2.0 * q[0]);
            return Eigen::MatrixXd(g);
        },
        [](const Eigen::VectorXd& q) {
            Tensor3 d(2);
            d(0, 1, 1) = 2.0 * std::exp(2.0 * q[0]);
            return d;
        });
    return SystemSpec{"neg_curv_patch",
                      chart,
                      G,
                      ScalarField::zero(),
                      ActuationFrame::coordinate_basis(2),
                      p,
                      {{"sectional_curvature", {-1.0, RefTag::Derived}}}};
}

const std::map<std::string, std::map<std::string, double>>& default_params() {
    static const std::map<std::string, std::map<std::string, double>> defaults = {
        {"flat_free", {}},
        {"harmonic2d", {{"k", 1.0}}},
        {"pendulum", {{"m", 1.0}, {"l", 1.0}, {"g", 9.81}}},
        {"cart_pendulum", {{"m_c", 1.0}, {"m_p", 0.1}, {"l", 0.5}, {"g", 9.81}}},
        {"sphere", {{"radius", 1.0}}},
        {"neg_curv_patch", {}},
    };
    return defaults;
}

}  // namespace

SystemSpec get_system(const std::string& name,
                      const std::map<std::string, double>& overrides) {
    const auto& all = default_params();
    const auto it = all.find(name);
    if (it == all.end()) throw UnknownSystem("unknown system '" + name + "'");
    const auto p = merge_params(it->second, overrides, name);

    if (name == "flat_free") return make_flat_free(p);
    if (name == "harmonic2d") return make_harmonic2d(p);
    if (name == "pendulum") return make_pendulum(p);
    if (name == "cart_pendulum") return make_cart_pendulum(p);
    if (name == "sphere") return make_sphere(p);
    return make_neg_curv_patch(p);
}

SystemSpec get_system(const std::string& name) { return get_system(name, {}); }

std::vector<std::string> list_systems() {
    std::vector<std::string> names;
    for (const auto& [name, _] : default_params()) names.push_back(name);
    return names;
}

}  // namespace geoctl
