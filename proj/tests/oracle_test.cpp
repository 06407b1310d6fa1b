#include "dynafit/error.hpp"
#include "dynafit/kernels.hpp"
#include "dynafit/oracle.hpp"
#include "test_helpers.hpp"

#include <gtest/gtest.h>

using namespace dynafit;
using namespace dynafit::oracle;
using dynafit::testing::make;
using dynafit::testing::max_relative;

TEST(ExplicitMap, LogisticPowers) {
    const Eigen::VectorXd phi = explicit_map(LogisticTruncated{3, 1}, make({{0.5}}));
    ASSERT_EQ(phi.size(), 3);
    EXPECT_EQ(phi(0), 0.5);
    EXPECT_EQ(phi(1), 0.25);
    EXPECT_EQ(phi(2), 0.125);
}

TEST(ExplicitMap, LinearPolynomialIsAffineEmbedding) {
    const double a = 0.7, b = -1.3, c = 2.0, e = 0.4;
    const ExplicitFeatureMap fm = PolynomialExplicit{1, 2};
    EXPECT_EQ(output_dimension(fm), 3u);
    const double ip = explicit_map(fm, make({{a, b}})).dot(explicit_map(fm, make({{c, e}})));
    EXPECT_NEAR(ip, 1 + a * c + b * e, 1e-15);
}

TEST(ExplicitMap, LogisticInnerProductMatchesClosedForm) {
    const auto x = make({{0.5, 0.25}});
    const Eigen::VectorXd phi = explicit_map(LogisticTruncated{60, 2}, x);
    EXPECT_NEAR(phi.dot(phi), 0.4, 1e-12);
    EXPECT_NEAR(phi.dot(phi), eval_kernel(LogisticMapKernel{}, x, x), 1e-12);
}

TEST(ExplicitMap, PolynomialReproducesKernel) {
    std::mt19937_64 rng(1);
    for (int d = 1; d <= 4; ++d) {
        const auto x = dynafit::testing::random_trajectory(rng, 2, 3);
        const auto y = dynafit::testing::random_trajectory(rng, 2, 3);
        const ExplicitFeatureMap fm = PolynomialExplicit{d, 6};
        const double ip = explicit_map(fm, x).dot(explicit_map(fm, y));
        EXPECT_LE(max_relative(ip, eval_kernel(PolynomialKernel{d}, x, y)), 1e-12) << d;
    }
}

TEST(ExplicitMap, DimensionCountsMonomials) {
    // C(m + d, d)
    EXPECT_EQ(output_dimension(PolynomialExplicit{2, 3}), 10u);
    EXPECT_EQ(output_dimension(PolynomialExplicit{3, 15}), 816u);
    EXPECT_EQ(output_dimension(LogisticTruncated{4, 5}), 20u);
}

TEST(ExplicitMap, DimensionGuard) {
    EXPECT_THROW(output_dimension(PolynomialExplicit{10, 1000}), DomainError);
    EXPECT_THROW(output_dimension(LogisticTruncated{1'000'000, 2}), DomainError);
}

TEST(ExplicitMap, InputLengthMismatch) {
    EXPECT_THROW(explicit_map(PolynomialExplicit{2, 3}, make({{1, 2}})), ShapeError);
    EXPECT_THROW(explicit_map(LogisticTruncated{2, 3}, make({{0.1, 0.2}})), ShapeError);
}

TEST(OracleDistance, MemberOfTrainingSetIsZero) {
    std::mt19937_64 rng(2);
    const auto set = dynafit::testing::random_set(rng, 4, 1, 3);
    const ExplicitFeatureMap fm = PolynomialExplicit{2, 3};
    const Eigen::VectorXd phi = explicit_map(fm, set[2]);
    EXPECT_LE(oracle_distance(fm, set, set[2], 0.0), 1e-8 * phi.squaredNorm());
}

TEST(OracleDistance, OrthogonalLiftHasFullResidual) {
    // phi(X) = (1, 1, 0), phi(Y) = (1, 0, 1)
    const ExplicitFeatureMap fm = PolynomialExplicit{1, 2};
    EXPECT_NEAR(oracle_distance(fm, {make({{1, 0}})}, make({{0, 1}}), 0.0), 1.5, 1e-14);
}

TEST(Subspace, IdempotentProjector) {
    std::mt19937_64 rng(3);
    const auto set = dynafit::testing::random_set(rng, 6, 2, 2);
    const ExplicitFeatureMap fm = PolynomialExplicit{2, 4};
    const Subspace s = training_subspace(fm, set, 1e-10);
    const Eigen::VectorXd phi = explicit_map(fm, dynafit::testing::random_trajectory(rng, 2, 2));
    EXPECT_LE(max_relative(residual(s, phi, 1), residual(s, phi, 2)), 1e-12);
}
