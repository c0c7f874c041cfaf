#include "geoctl/fields.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "geoctl/defaults.hpp"
#include "geoctl/errors.hpp"

namespace geoctl {

namespace {

std::string point_string(const Eigen::VectorXd& q) {
    std::ostringstream os;
    os << "(";
    for (int i = 0; i < q.size(); ++i) os << (i ? ", " : "") << q[i];
    os << ")";
    return os.str();
}

}  // namespace

Chart::Chart(std::vector<std::string> coord_names, Eigen::VectorXd lower,
             Eigen::VectorXd upper, std::vector<bool> periodic)
    : names_(std::move(coord_names)),
      lower_(std::move(lower)),
      upper_(std::move(upper)),
      periodic_(std::move(periodic)) {
    const int n = dim();
    if (n < 1) throw Error("chart dimension must be at least 1");
    if (lower_.size() != n || upper_.size() != n || static_cast<int>(periodic_.size()) != n)
        throw Error("chart field sizes disagree");
    for (int i = 0; i < n; ++i) {
        if (!(lower_[i] < upper_[i])) throw Error("chart bounds must satisfy lower < upper");
        if (periodic_[static_cast<std::size_t>(i)] &&
            (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i])))
            throw Error("periodic coordinates need finite bounds");
    }
}

Chart Chart::unbounded(std::vector<std::string> coord_names) {
    const int n = static_cast<int>(coord_names.size());
    const double inf = std::numeric_limits<double>::infinity();
    return Chart(std::move(coord_names), Eigen::VectorXd::Constant(n, -inf),
                 Eigen::VectorXd::Constant(n, inf),
                 std::vector<bool>(static_cast<std::size_t>(n), false));
}

Eigen::VectorXd Chart::wrap(const Eigen::VectorXd& q) const {
    Eigen::VectorXd out = q;
    for (int i = 0; i < dim(); ++i) {
        if (!periodic_[static_cast<std::size_t>(i)]) continue;
        const double p = period(i);
        double x = std::fmod(out[i] - lower_[i], p);
        if (x < 0.0) x += p;
        out[i] = lower_[i] + x;
    }
    return out;
}

bool Chart::contains(const Eigen::VectorXd& q) const {
    if (q.size() != dim()) return false;
    const Eigen::VectorXd w = wrap(q);
    for (int i = 0; i < dim(); ++i) {
        if (periodic_[static_cast<std::size_t>(i)]) continue;
        if (!(w[i] >= lower_[i] && w[i] <= upper_[i])) return false;
        if (!std::isfinite(w[i])) return false;
    }
    return true;
}

Eigen::VectorXd Chart::checked(const Eigen::VectorXd& q) const {
    if (!contains(q)) throw DomainError("point outside chart: " + point_string(q));
    return wrap(q);
}

ScalarField ScalarField::zero() {
    return ScalarField([](const Eigen::VectorXd&) { return 0.0; },
                       [](const Eigen::VectorXd& q) {
                           return Eigen::VectorXd::Zero(q.size()).eval();
                       });
}

MetricField MetricField::constant(Chart chart, const Eigen::MatrixXd& g) {
    Tensor3 zero(chart.dim());
    return MetricField(
        std::move(chart), [g](const Eigen::VectorXd&) { return g; },
        [zero](const Eigen::VectorXd&) { return zero; });
}

ActuationFrame ActuationFrame::coordinate_basis(int n) {
    std::vector<int> axes(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) axes[static_cast<std::size_t>(i)] = i;
    return coordinate_axes(n, axes);
}

ActuationFrame ActuationFrame::coordinate_axes(int n, const std::vector<int>& axes) {
    std::vector<FieldFn> fields;
    fields.reserve(axes.size());
    for (int axis : axes) {
        fields.push_back([n, axis](const Eigen::VectorXd&) {
            return Eigen::VectorXd::Unit(n, axis).eval();
        });
    }
    return ActuationFrame(std::move(fields));
}

Eigen::MatrixXd ActuationFrame::evaluate(const Eigen::VectorXd& q) const {
    const int n = static_cast<int>(q.size());
    const int m = size();
    Eigen::MatrixXd e(n, m);
    for (int i = 0; i < m; ++i) {
        Eigen::VectorXd col = fields_[static_cast<std::size_t>(i)](q);
        if (col.size() != n) throw Error("frame field returned vector of wrong dimension");
        e.col(i) = col;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(e);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv[sv.size() - 1] <= defaults::kFrameRank * sv[0])
        throw RankDeficientFrame("actuation frame rank-deficient at " + point_string(q));
    return e;
}

}  // namespace geoctl
