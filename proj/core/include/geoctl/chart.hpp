#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace geoctl {

/// Single coordinate chart on the configuration space.
///
/// Periodic coordinates wrap by modular reduction into [lower, upper);
/// non-periodic coordinates must stay within their (possibly infinite)
/// bounds. One chart per system; no atlas machinery.
class Chart {
public:
    Chart(std::vector<std::string> coord_names,
          Eigen::VectorXd lower,
          Eigen::VectorXd upper,
          std::vector<bool> periodic);

    /// All-real chart with infinite bounds and no periodicity.
    static Chart unbounded(std::vector<std::string> coord_names);

    int dim() const { return static_cast<int>(names_.size()); }
    const std::vector<std::string>& coord_names() const { return names_; }
    const Eigen::VectorXd& lower() const { return lower_; }
    const Eigen::VectorXd& upper() const { return upper_; }
    bool periodic(int axis) const { return periodic_[static_cast<std::size_t>(axis)]; }
    double period(int axis) const { return upper_[axis] - lower_[axis]; }

    /// Modular reduction of periodic components; others pass through.
    Eigen::VectorXd wrap(const Eigen::VectorXd& q) const;

    /// True when wrap(q) lies within all non-periodic bounds.
    bool contains(const Eigen::VectorXd& q) const;

    /// wrap(q), throwing DomainError when the point is outside the chart.
    Eigen::VectorXd checked(const Eigen::VectorXd& q) const;

private:
    std::vector<std::string> names_;
    Eigen::VectorXd lower_;
    Eigen::VectorXd upper_;
    std::vector<bool> periodic_;
};

}  // namespace geoctl
