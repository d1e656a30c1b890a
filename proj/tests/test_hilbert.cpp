#include "proxreg/errors.hpp"
#include "proxreg/hilbert.hpp"
#include "proxreg/linalg.hpp"
#include "proxreg/random.hpp"

#include "support/problems.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <set>

using namespace proxreg;
using proxreg::testing::mat;
using proxreg::testing::vec;

TEST(Hilbert, InnerProductAndNorms)
{
    const Vector x = vec({3.0, 4.0});
    const Vector y = vec({1.0, -2.0});
    EXPECT_DOUBLE_EQ(inner(x, y), -5.0);
    EXPECT_DOUBLE_EQ(norm(x), 5.0);
    EXPECT_DOUBLE_EQ(squared_norm(x), 25.0);
    EXPECT_DOUBLE_EQ(dist(x, y), std::sqrt(4.0 + 36.0));
}

TEST(Hilbert, MismatchedDimensionsThrow)
{
    EXPECT_THROW((void)inner(vec({1.0, 2.0}), vec({1.0, 2.0, 3.0})), DimensionError);
    EXPECT_THROW((void)dist(vec({1.0}), vec({1.0, 2.0})), DimensionError);
    EXPECT_NO_THROW(require_same_dim(vec({1.0}), vec({2.0})));
}

TEST(Hilbert, RequireFiniteRejectsNanInfAndEmpty)
{
    EXPECT_THROW(require_finite(vec({1.0, std::numeric_limits<double>::quiet_NaN()})), DomainError);
    EXPECT_THROW(require_finite(vec({std::numeric_limits<double>::infinity()})), DomainError);
    EXPECT_THROW(require_finite(Vector()), DomainError);
    EXPECT_NO_THROW(require_finite(vec({0.0})));
}

TEST(Hilbert, MembershipToleranceScalesWithNorm)
{
    EXPECT_DOUBLE_EQ(membership_tolerance(vec({0.0, 0.0})), 1e-10);
    EXPECT_DOUBLE_EQ(membership_tolerance(vec({3.0, 4.0})), 6e-10);
}

TEST(Random, DerivedSeedsAreDistinctAndStable)
{
    std::set<std::uint64_t> seen;
    for (std::uint64_t s = 0; s < 50; ++s) {
        for (std::uint64_t t = 0; t < 50; ++t) {
            seen.insert(derive_seed(s, t));
        }
    }
    EXPECT_EQ(seen.size(), 2500u);
    EXPECT_EQ(derive_seed(7, 3), derive_seed(7, 3));
    EXPECT_NE(derive_seed(7, 3), derive_seed(3, 7));
}

TEST(Random, UniformInBallStaysInsideAndFillsVolume)
{
    Engine rng(derive_seed(11, 0));
    const Vector c = vec({1.0, -1.0, 0.5});
    constexpr int n = 20000;
    int inner_half = 0;
    for (int i = 0; i < n; ++i) {
        const Vector x = uniform_in_ball(rng, c, 2.0);
        ASSERT_LE(dist(x, c), 2.0 + 1e-12);
        if (dist(x, c) <= 1.0) {
            ++inner_half;
        }
    }
    // Volume fraction of the half-radius ball in R^3 is 1/8.
    EXPECT_NEAR(static_cast<double>(inner_half) / n, 0.125, 0.01);
}

TEST(Linalg, LeastSquaresRankAndNullSpace)
{
    const LeastSquares ls(mat({{2.0, 0.0}, {0.0, 0.0}}));
    EXPECT_EQ(ls.rank, 1);
    EXPECT_DOUBLE_EQ(ls.sigma_max, 2.0);
    EXPECT_DOUBLE_EQ(ls.sigma_min_kept, 2.0);
    ASSERT_EQ(ls.null_basis.cols(), 1);
    EXPECT_NEAR(std::abs(ls.null_basis(1, 0)), 1.0, 1e-14);
    EXPECT_TRUE(ls.solve(vec({4.0, 0.0})).isApprox(vec({2.0, 0.0})));
}

TEST(Linalg, MinSymmetricEigenvalueIgnoresSkewPart)
{
    EXPECT_NEAR(min_symmetric_eigenvalue(mat({{0.0, 1.0}, {-1.0, 0.0}})), 0.0, 1e-15);
    EXPECT_NEAR(min_symmetric_eigenvalue(mat({{-1.0, 0.0}, {0.0, 0.0}})), -1.0, 1e-15);
}
