#pragma once

#include "dynafit/trajectory.hpp"

#include <Eigen/Dense>

#include <string>
#include <variant>

namespace dynafit {

/// (1 + <x, y>)^degree on flattened trajectories.
struct PolynomialKernel {
    int degree = 2;
    friend bool operator==(const PolynomialKernel&, const PolynomialKernel&) = default;
};

/// exp(-||x - y||^2 / width^2) on flattened trajectories.
struct GaussianKernel {
    double width = 1.0;
    friend bool operator==(const GaussianKernel&, const GaussianKernel&) = default;
};

/// sum_k x_k y_k / (1 - x_k y_k): the inner product of the infinite monomial
/// lift (x, x^2, x^3, ...) stacked over time. Scalar series in [0, 1) only.
struct LogisticMapKernel {
    friend bool operator==(const LogisticMapKernel&, const LogisticMapKernel&) = default;
};

/// Same lift cut at degree `truncation`:
/// sum_k x_k y_k (1 - (x_k y_k)^l) / (1 - x_k y_k).
struct TruncatedLogisticKernel {
    int truncation = 10;
    friend bool operator==(const TruncatedLogisticKernel&, const TruncatedLogisticKernel&) = default;
};

using KernelSpec =
    std::variant<PolynomialKernel, GaussianKernel, LogisticMapKernel, TruncatedLogisticKernel>;

/// Inputs with an entry at or above this bound are rejected by the logistic kernels.
inline constexpr double kLogisticUpperBound = 1.0 - 1e-12;

/// Throws InvalidArgument if the parameters violate degree >= 1, width > 0, truncation >= 1.
void validate(const KernelSpec& spec);

bool is_logistic(const KernelSpec& spec);

/// Short human-readable form, e.g. "poly(d=2)".
std::string describe(const KernelSpec& spec);

/// Checks the shape and domain preconditions of `spec` for one trajectory.
void check_domain(const KernelSpec& spec, const Trajectory& t);

/// k(x, y). Throws ShapeError, DomainError or NumericError (non-finite result).
double eval_kernel(const KernelSpec& spec, const Trajectory& x, const Trajectory& y);

/// Symmetric p x p matrix of k(set_i, set_j). The upper triangle is evaluated
/// and mirrored, so the result is exactly symmetric.
Eigen::MatrixXd gram(const KernelSpec& spec, const TrajectorySet& set);

/// q x p matrix with entry (i, j) = k(test_i, train_j).
Eigen::MatrixXd cross_gram(const KernelSpec& spec, const TrajectorySet& test,
                           const TrajectorySet& train);

/// k(t_i, t_i) for every trajectory.
Eigen::VectorXd gram_diagonal(const KernelSpec& spec, const TrajectorySet& set);

}  // namespace dynafit
