#include "dynafit/trajectory.hpp"

#include "dynafit/error.hpp"

#include <string>
#include <utility>

namespace dynafit {

Trajectory::Trajectory(Eigen::MatrixXd states) : states_(std::move(states)) {
    if (states_.rows() < 1 || states_.cols() < 1)
        throw ShapeError("trajectory must have at least one state component and one time step");
    if (!states_.allFinite())
        throw DomainError("trajectory contains non-finite entries");
}

Trajectory Trajectory::from_series(const std::vector<double>& values) {
    Eigen::MatrixXd m(1, static_cast<Eigen::Index>(values.size()));
    for (std::size_t k = 0; k < values.size(); ++k)
        m(0, static_cast<Eigen::Index>(k)) = values[k];
    return Trajectory(std::move(m));
}

Eigen::VectorXd flatten(const Trajectory& t) { return t.flat(); }

void require_uniform_shape(const TrajectorySet& set) {
    if (set.empty())
        throw ShapeError("trajectory set is empty");
    const auto n = set.front().state_dim();
    const auto N = set.front().length();
    for (std::size_t i = 1; i < set.size(); ++i) {
        if (set[i].state_dim() != n || set[i].length() != N)
            throw ShapeError("trajectory " + std::to_string(i) + " has shape " +
                             std::to_string(set[i].state_dim()) + "x" +
                             std::to_string(set[i].length()) + ", expected " + std::to_string(n) +
                             "x" + std::to_string(N));
    }
}

}  // namespace dynafit
