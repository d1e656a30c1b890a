// Serial reference against OpenMP kernels on the sampling-heavy workloads.

#include "proxreg/algorithms.hpp"
#include "proxreg/regularity.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace proxreg;
using kernels::Execution;

namespace {

Execution exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Execution::serial : Execution::parallel; }

std::vector<MonotoneOperator> two_axes()
{
    Vector e1 = Vector::Unit(2, 0);
    Vector e2 = Vector::Unit(2, 1);
    return {MonotoneOperator(NormalConeOp{Hyperplane{e2, 0.0}}), MonotoneOperator(NormalConeOp{Hyperplane{e1, 0.0}})};
}

void BM_SubregularityEstimate(benchmark::State& state)
{
    Matrix A = Matrix::Zero(6, 6);
    A.diagonal() << 3.0, 2.0, 1.0, 0.5, 0.0, 0.0;
    A(0, 1) = 1.0;
    A(1, 0) = -1.0;
    const MonotoneOperator T(LinearOp{A});
    const Vector center = Vector::Zero(6);
    for (auto _ : state) {
        benchmark::DoNotOptimize(estimate_subregularity_modulus(T, center, 1.0, 10000, 1, exec_of(state)));
    }
}

void BM_KappaEstimate(benchmark::State& state)
{
    const std::vector<ConvexSet> sets = {Ball{Vector::Zero(3), 2.0}, Halfspace{Vector::Ones(3), 0.0},
                                         Hyperplane{Vector::Unit(3, 2), 0.0}};
    for (auto _ : state) {
        benchmark::DoNotOptimize(estimate_kappa(sets, Vector::Zero(3), 0.5, 2000, 2, {}, exec_of(state)));
    }
}

void BM_MultiRateTrials(benchmark::State& state)
{
    const auto ops = two_axes();
    RunConfig cfg;
    cfg.schedule = LambdaSchedule::constant(2.0);
    cfg.max_iters = 200;
    const Vector x0 = Vector::Ones(2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(verify_rate_multi(ops, x0, cfg, 1.05, 1.0, 1000, exec_of(state)));
    }
}

void BM_FirmNonexpansiveness(benchmark::State& state)
{
    const MonotoneOperator T(NormalConeOp{Ball{Vector::Zero(8), 1.0}});
    const Resolvent J(T, 1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(check_firm_nonexpansiveness(J, Vector::Zero(8), 2.0, 20000, 3, 1e-10, exec_of(state)));
    }
}

} // namespace

// Argument 0 runs the serial reference, 1 the OpenMP kernel.
BENCHMARK(BM_SubregularityEstimate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KappaEstimate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MultiRateTrials)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FirmNonexpansiveness)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
