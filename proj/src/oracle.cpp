#include "dynafit/oracle.hpp"

#include "dynafit/error.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace dynafit::oracle {
namespace {

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i)
        f *= i;
    return f;
}

// C(m + d, d), saturating past the guard.
std::size_t monomial_count(std::size_t variables, int degree) {
    double count = 1.0;
    for (int i = 1; i <= degree; ++i) {
        count = count * static_cast<double>(variables + static_cast<std::size_t>(i)) / i;
        if (count > static_cast<double>(kMaxFeatureDim))
            return kMaxFeatureDim + 1;
    }
    return static_cast<std::size_t>(std::llround(count));
}

// Appends sqrt(d! / (alpha_0! alpha_1! ... alpha_m!)) x^alpha for every
// exponent vector with |alpha| <= d, where alpha_0 = d - |alpha|. Summing the
// products of matching features over all alpha is the multinomial expansion
// of (1 + x^T y)^d.
void append_monomials(const Eigen::VectorXd& x, int degree, std::size_t var, int remaining,
                      double value, double inv_factorials, std::vector<double>& out) {
    if (var == static_cast<std::size_t>(x.size())) {
        const double weight = factorial(degree) * inv_factorials / factorial(remaining);
        out.push_back(std::sqrt(weight) * value);
        return;
    }
    double power = 1.0;
    for (int a = 0; a <= remaining; ++a) {
        append_monomials(x, degree, var + 1, remaining - a, value * power,
                         inv_factorials / factorial(a), out);
        power *= x(static_cast<Eigen::Index>(var));
    }
}

double effective_threshold(double eigen_threshold_rel, std::size_t p) {
    return std::max(eigen_threshold_rel, 64.0 * static_cast<double>(std::max<std::size_t>(p, 1)) *
                                             std::numeric_limits<double>::epsilon());
}

}  // namespace

std::size_t output_dimension(const ExplicitFeatureMap& fm) {
    std::size_t dim = 0;
    if (const auto* poly = std::get_if<PolynomialExplicit>(&fm)) {
        dim = monomial_count(poly->input_length, poly->degree);
    } else {
        const auto& lt = std::get<LogisticTruncated>(fm);
        const auto l = static_cast<std::size_t>(std::max(lt.truncation, 0));
        dim = (lt.length != 0 && l > kMaxFeatureDim / lt.length) ? kMaxFeatureDim + 1
                                                                  : l * lt.length;
    }
    if (dim > kMaxFeatureDim)
        throw DomainError("explicit feature dimension exceeds " + std::to_string(kMaxFeatureDim));
    return dim;
}

Eigen::VectorXd explicit_map(const ExplicitFeatureMap& fm, const Trajectory& t) {
    const std::size_t dim = output_dimension(fm);
    const Eigen::VectorXd x = flatten(t);
    if (const auto* poly = std::get_if<PolynomialExplicit>(&fm)) {
        if (static_cast<std::size_t>(x.size()) != poly->input_length)
            throw ShapeError("trajectory does not match the feature map input length");
        std::vector<double> features;
        features.reserve(dim);
        append_monomials(x, poly->degree, 0, poly->degree, 1.0, 1.0, features);
        return Eigen::Map<Eigen::VectorXd>(features.data(), static_cast<Eigen::Index>(dim));
    }
    const auto& lt = std::get<LogisticTruncated>(fm);
    if (t.state_dim() != 1 || static_cast<std::size_t>(t.length()) != lt.length)
        throw ShapeError("trajectory does not match the feature map length");
    Eigen::VectorXd phi(static_cast<Eigen::Index>(dim));
    Eigen::Index pos = 0;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        double power = 1.0;
        for (int m = 1; m <= lt.truncation; ++m) {
            power *= x(k);
            phi(pos++) = power;
        }
    }
    return phi;
}

Subspace training_subspace(const ExplicitFeatureMap& fm, const TrajectorySet& train_set,
                           double eigen_threshold_rel) {
    if (train_set.empty())
        throw InvalidArgument("oracle training set is empty");
    const auto dim = static_cast<Eigen::Index>(output_dimension(fm));
    Eigen::MatrixXd lifted(dim, static_cast<Eigen::Index>(train_set.size()));
    for (std::size_t j = 0; j < train_set.size(); ++j)
        lifted.col(static_cast<Eigen::Index>(j)) = explicit_map(fm, train_set[j]);

    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(lifted, Eigen::ComputeThinU);
    const Eigen::VectorXd& s = svd.singularValues();
    if (s.size() == 0 || !(s(0) > 0.0))
        throw NumericError("oracle feature matrix is identically zero");
    const double cutoff = effective_threshold(eigen_threshold_rel, train_set.size()) * s(0) * s(0);
    Eigen::Index k = 0;
    while (k < s.size() && s(k) * s(k) > cutoff)
        ++k;
    return {svd.matrixU().leftCols(k), s.head(k)};
}

double residual(const Subspace& s, const Eigen::VectorXd& phi, int passes) {
    Eigen::VectorXd projected = phi;
    for (int i = 0; i < passes; ++i)
        projected = s.basis * (s.basis.transpose() * projected);
    return (phi - projected).squaredNorm();
}

double oracle_distance(const ExplicitFeatureMap& fm, const TrajectorySet& train_set,
                       const Trajectory& test, double eigen_threshold_rel) {
    const Subspace s = training_subspace(fm, train_set, eigen_threshold_rel);
    return residual(s, explicit_map(fm, test));
}

}  // namespace dynafit::oracle
