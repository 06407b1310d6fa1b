#pragma once

// Brute-force reference for the kernel pipeline: lifts trajectories into an
// explicit finite feature space and measures residuals with an SVD of the
// lifted training matrix. Only small instances are tractable; used by tests.

#include "dynafit/trajectory.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <variant>

namespace dynafit::oracle {

inline constexpr std::size_t kMaxFeatureDim = 1'000'000;

/// Weighted monomials of total degree <= degree in `input_length` variables;
/// inner products equal (1 + x^T y)^degree.
struct PolynomialExplicit {
    int degree = 1;
    std::size_t input_length = 1;
};

/// (x_k, x_k^2, ..., x_k^truncation) stacked over the `length` time steps.
struct LogisticTruncated {
    int truncation = 1;
    std::size_t length = 1;
};

using ExplicitFeatureMap = std::variant<PolynomialExplicit, LogisticTruncated>;

/// Throws DomainError when the dimension would exceed kMaxFeatureDim.
std::size_t output_dimension(const ExplicitFeatureMap& fm);

Eigen::VectorXd explicit_map(const ExplicitFeatureMap& fm, const Trajectory& t);

/// Orthonormal basis U of the retained left singular subspace of the lifted
/// training matrix.
struct Subspace {
    Eigen::MatrixXd basis;
    Eigen::VectorXd singular_values;
};

Subspace training_subspace(const ExplicitFeatureMap& fm, const TrajectorySet& train_set,
                           double eigen_threshold_rel);

/// ||phi - (U U^T)^passes phi||^2.
double residual(const Subspace& s, const Eigen::VectorXd& phi, int passes = 1);

/// ||phi(test) - U U^T phi(test)||^2.
double oracle_distance(const ExplicitFeatureMap& fm, const TrajectorySet& train_set,
                       const Trajectory& test, double eigen_threshold_rel);

}  // namespace dynafit::oracle
