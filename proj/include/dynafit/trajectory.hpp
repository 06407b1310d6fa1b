#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace dynafit {

/// A sampled trajectory: n state components (rows) over N time steps (columns).
///
/// Storage is Eigen's default column-major layout, so the raw buffer is
/// already the time-major stacking (x_0, x_1, ..., x_{N-1}).
class Trajectory {
public:
    Trajectory() = default;

    /// Throws ShapeError for an empty matrix and DomainError for non-finite entries.
    explicit Trajectory(Eigen::MatrixXd states);

    /// Convenience for scalar (n = 1) series.
    static Trajectory from_series(const std::vector<double>& values);

    Eigen::Index state_dim() const { return states_.rows(); }
    Eigen::Index length() const { return states_.cols(); }
    const Eigen::MatrixXd& states() const { return states_; }

    /// Time-major view of the samples; length state_dim() * length().
    Eigen::Map<const Eigen::VectorXd> flat() const {
        return {states_.data(), states_.size()};
    }

    friend bool operator==(const Trajectory& a, const Trajectory& b) {
        return a.states_.rows() == b.states_.rows() && a.states_.cols() == b.states_.cols() &&
               a.states_ == b.states_;
    }

private:
    Eigen::MatrixXd states_;
};

using TrajectorySet = std::vector<Trajectory>;

/// Copy of the flattened samples: (x_0^T, x_1^T, ..., x_{N-1}^T)^T.
Eigen::VectorXd flatten(const Trajectory& t);

/// Throws ShapeError unless every trajectory has the same n and N.
void require_uniform_shape(const TrajectorySet& set);

}  // namespace dynafit
