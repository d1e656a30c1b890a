// The OpenMP kernels must reproduce the serial reference bit for bit.

#include "proxreg/algorithms.hpp"
#include "proxreg/kernels.hpp"
#include "proxreg/regularity.hpp"

#include "support/problems.hpp"

#include <gtest/gtest.h>
#include <omp.h>

#include <stdexcept>

using namespace proxreg;
using kernels::Execution;
using proxreg::testing::affine_operators;
using proxreg::testing::bundled_multi_problems;
using proxreg::testing::bundled_operators;
using proxreg::testing::two_axes;
using proxreg::testing::vec;

namespace {

class Kernels : public ::testing::Test {
protected:
    void SetUp() override
    {
        saved_ = omp_get_max_threads();
        omp_set_num_threads(4);
    }
    void TearDown() override { omp_set_num_threads(saved_); }

private:
    int saved_ = 1;
};

RunConfig constant_run(double lambda, int max_iters, std::uint64_t seed)
{
    RunConfig cfg;
    cfg.schedule = LambdaSchedule::constant(lambda);
    cfg.max_iters = max_iters;
    cfg.seed = seed;
    return cfg;
}

} // namespace

TEST_F(Kernels, GenerateKeepsIndexOrder)
{
    const auto f = [](std::size_t i) { return static_cast<int>(i * i); };
    const auto a = kernels::generate<int>(Execution::parallel, 1000, f);
    const auto b = kernels::generate<int>(Execution::serial, 1000, f);
    EXPECT_EQ(a, b);
}

TEST_F(Kernels, GenerateRethrowsLowestIndexError)
{
    const auto f = [](std::size_t i) -> int {
        if (i % 7 == 3) {
            throw std::runtime_error("item " + std::to_string(i));
        }
        return 0;
    };
    for (const auto exec : {Execution::serial, Execution::parallel}) {
        try {
            (void)kernels::generate<int>(exec, 100, f);
            FAIL();
        } catch (const std::runtime_error& e) {
            EXPECT_STREQ(e.what(), "item 3");
        }
    }
}

TEST_F(Kernels, MaxRatioCountsSkips)
{
    const auto f = [](std::size_t i) -> std::optional<double> {
        if (i % 3 == 0) {
            return std::nullopt;
        }
        return static_cast<double>((i * 37) % 101);
    };
    const auto a = kernels::max_ratio(Execution::parallel, 999, f);
    EXPECT_EQ(a, kernels::max_ratio(Execution::serial, 999, f));
    EXPECT_EQ(a.skipped, 333u);
    EXPECT_EQ(a.used, 666u);
    EXPECT_EQ(a.max_ratio, 100.0);
}

TEST_F(Kernels, SubregularityEstimatesMatch)
{
    for (const auto& [name, T] : affine_operators()) {
        const Vector c = T.zero_set().project(Vector::Zero(T.dim()));
        const auto p = estimate_subregularity_modulus(T, c, 1.0, 5000, 3, Execution::parallel);
        const auto s = estimate_subregularity_modulus(T, c, 1.0, 5000, 3, Execution::serial);
        EXPECT_EQ(p.modulus, s.modulus) << name;
        EXPECT_EQ(p.samples_used, s.samples_used) << name;
    }
}

TEST_F(Kernels, KappaEstimatesMatch)
{
    for (const auto& prob : bundled_multi_problems()) {
        std::vector<ConvexSet> sets;
        for (const auto& op : prob.ops) {
            sets.push_back(op.zero_set());
        }
        const Vector c = dykstra_project(sets, prob.x0);
        const auto p = estimate_kappa(sets, c, 0.5, 500, 4, {}, Execution::parallel);
        const auto s = estimate_kappa(sets, c, 0.5, 500, 4, {}, Execution::serial);
        EXPECT_EQ(p.modulus, s.modulus) << prob.name;
        EXPECT_EQ(p.samples_skipped, s.samples_skipped) << prob.name;
    }
}

TEST_F(Kernels, FirmNonexpansivenessReportsMatch)
{
    for (const auto& [name, T] : bundled_operators()) {
        const Resolvent J(T, 1.0);
        const Vector c = Vector::Zero(T.dim());
        const auto p = check_firm_nonexpansiveness(J, c, 2.0, 500, 8, 1e-10, Execution::parallel);
        const auto s = check_firm_nonexpansiveness(J, c, 2.0, 500, 8, 1e-10, Execution::serial);
        EXPECT_EQ(p.violations, s.violations) << name;
        EXPECT_EQ(p.worst_excess, s.worst_excess) << name;
    }
}

TEST_F(Kernels, MultiRateChecksMatch)
{
    const auto ops = two_axes();
    const auto cfg = constant_run(2.0, 200, 17);
    const auto p = verify_rate_multi(ops, vec({1.0, 1.0}), cfg, 1.05, 1.0, 300, Execution::parallel);
    const auto s = verify_rate_multi(ops, vec({1.0, 1.0}), cfg, 1.05, 1.0, 300, Execution::serial);
    ASSERT_EQ(p.steps.size(), s.steps.size());
    for (std::size_t k = 0; k < p.steps.size(); ++k) {
        EXPECT_EQ(p.steps[k].contributing, s.steps[k].contributing);
        EXPECT_EQ(p.steps[k].sampled_mean, s.steps[k].sampled_mean);
        EXPECT_EQ(p.steps[k].conditional_mean, s.steps[k].conditional_mean);
    }
    EXPECT_EQ(p.monotonicity_violations, s.monotonicity_violations);
}

TEST_F(Kernels, BarycentricComparisonsMatch)
{
    const auto prob = bundled_multi_problems()[2];
    const auto cfg = constant_run(2.0, 100, 5);
    const auto p = compare_barycentric(prob.ops, prob.x0, cfg, 2.0, 1.0, 100, Execution::parallel);
    const auto s = compare_barycentric(prob.ops, prob.x0, cfg, 2.0, 1.0, 100, Execution::serial);
    EXPECT_EQ(p.randomized_mean_dist_sq, s.randomized_mean_dist_sq);
}
