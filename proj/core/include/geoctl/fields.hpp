#pragma once

#include <Eigen/Dense>

#include <functional>
#include <utility>
#include <vector>

#include "geoctl/chart.hpp"
#include "geoctl/tensor.hpp"

namespace geoctl {

/// A point of the tangent bundle: chart point q and velocity components v.
struct TangentState {
    Eigen::VectorXd q;
    Eigen::VectorXd v;
};

/// Scalar function on the chart, with an optional analytic gradient.
/// Callers are expected to pass chart-wrapped points.
class ScalarField {
public:
    using Fn = std::function<double(const Eigen::VectorXd&)>;
    using GradFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

    ScalarField() = default;
    explicit ScalarField(Fn value) : value_(std::move(value)) {}
    ScalarField(Fn value, GradFn gradient)
        : value_(std::move(value)), gradient_(std::move(gradient)) {}

    static ScalarField zero();

    double operator()(const Eigen::VectorXd& q) const { return value_(q); }
    bool has_gradient() const { return static_cast<bool>(gradient_); }
    Eigen::VectorXd analytic_gradient(const Eigen::VectorXd& q) const { return gradient_(q); }

private:
    Fn value_;
    GradFn gradient_;
};

/// Point-to-symmetric-matrix map with an optional analytic derivative
/// evaluator returning d(k,i,j) = d_k g_ij. Owns the chart of its domain.
class MetricField {
public:
    using Fn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;
    using DerivFn = std::function<Tensor3(const Eigen::VectorXd&)>;

    MetricField(Chart chart, Fn value)
        : chart_(std::move(chart)), value_(std::move(value)) {}
    MetricField(Chart chart, Fn value, DerivFn derivative)
        : chart_(std::move(chart)),
          value_(std::move(value)),
          derivative_(std::move(derivative)) {}

    static MetricField constant(Chart chart, const Eigen::MatrixXd& g);

    const Chart& chart() const { return chart_; }
    bool has_derivative() const { return static_cast<bool>(derivative_); }

    /// Raw evaluator; use metric_eval() for the checked path.
    Eigen::MatrixXd raw(const Eigen::VectorXd& q) const { return value_(q); }
    Tensor3 analytic_derivative(const Eigen::VectorXd& q) const { return derivative_(q); }

private:
    Chart chart_;
    Fn value_;
    DerivFn derivative_;
};

/// The accessible degrees of freedom: m vector fields, linearly independent
/// at every evaluated point.
class ActuationFrame {
public:
    using FieldFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

    explicit ActuationFrame(std::vector<FieldFn> fields) : fields_(std::move(fields)) {}

    /// Full coordinate basis (fully actuated).
    static ActuationFrame coordinate_basis(int n);

    /// Constant frame spanned by the given coordinate axes.
    static ActuationFrame coordinate_axes(int n, const std::vector<int>& axes);

    int size() const { return static_cast<int>(fields_.size()); }

    /// n x m matrix whose columns are the frame vectors at q.
    /// Throws RankDeficientFrame when the columns lose independence.
    Eigen::MatrixXd evaluate(const Eigen::VectorXd& q) const;

private:
    std::vector<FieldFn> fields_;
};

}  // namespace geoctl
