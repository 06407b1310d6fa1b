#pragma once

#include "dynafit/trajectory.hpp"

#include <Eigen/Dense>

#include <random>

namespace dynafit::testing {

/// Uniform entries in [lo, hi).
inline Trajectory random_trajectory(std::mt19937_64& rng, Eigen::Index n, Eigen::Index N,
                                    double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    Eigen::MatrixXd m(n, N);
    for (Eigen::Index i = 0; i < m.size(); ++i)
        m.data()[i] = u(rng);
    return Trajectory(std::move(m));
}

inline TrajectorySet random_set(std::mt19937_64& rng, std::size_t count, Eigen::Index n,
                                Eigen::Index N, double lo = -1.0, double hi = 1.0) {
    TrajectorySet set;
    for (std::size_t i = 0; i < count; ++i)
        set.push_back(random_trajectory(rng, n, N, lo, hi));
    return set;
}

inline Trajectory make(std::initializer_list<std::initializer_list<double>> rows) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto N = static_cast<Eigen::Index>(rows.begin()->size());
    Eigen::MatrixXd m(n, N);
    Eigen::Index r = 0;
    for (const auto& row : rows) {
        Eigen::Index c = 0;
        for (double v : row)
            m(r, c++) = v;
        ++r;
    }
    return Trajectory(std::move(m));
}

inline double max_relative(double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace dynafit::testing
