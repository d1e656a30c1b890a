#pragma once

#include "proxreg/kernels.hpp"
#include "proxreg/operators.hpp"
#include "proxreg/regularity.hpp"
#include "proxreg/sets.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace proxreg {

/// Proximal parameters lambda_k: constant, or lambda0 * factor^k (factor > 1),
/// the latter driving lambda_k to infinity for superlinear convergence.
class LambdaSchedule {
public:
    enum class Kind { constant, geometric };

    static LambdaSchedule constant(double lambda);
    static LambdaSchedule geometric(double lambda0, double factor);

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] double lambda0() const noexcept { return lambda0_; }
    [[nodiscard]] double factor() const noexcept { return factor_; }
    [[nodiscard]] double at(int k) const;

private:
    LambdaSchedule(Kind kind, double lambda0, double factor) : kind_(kind), lambda0_(lambda0), factor_(factor) {}

    Kind kind_;
    double lambda0_;
    double factor_;
};

struct RunConfig {
    LambdaSchedule schedule = LambdaSchedule::constant(1.0);
    int max_iters = 1000;
    /// Stop once the distance to the (common) zero set is <= residual_tol.
    double residual_tol = 1e-10;
    std::uint64_t seed = 0;

    void validate() const;
};

/// ratio_sq is omitted once dist_k falls to this level.
inline constexpr double kRatioDistFloor = 1e-14;

/// One row of a trace. Rows with a step carry lambda_k, the residual
/// |x_k - x_{k+1}| / lambda_k and (randomized runs) the chosen index; the
/// terminal row has none of these.
struct IterationRecord {
    int k = 0;
    double lambda = 0.0;
    Vector x;
    double dist = 0.0;
    std::optional<double> ratio_sq;
    std::optional<double> residual;
    std::optional<std::size_t> chosen_index;
};

enum class RunStatus { converged, budget_exhausted };

struct Trace {
    std::vector<IterationRecord> records;
    RunStatus status = RunStatus::budget_exhausted;

    [[nodiscard]] double final_dist() const { return records.back().dist; }
    [[nodiscard]] int iterations() const { return records.back().k; }
};

/// Distance to cap_i T_i^{-1}(0), via Dykstra over the zero sets.
class CommonZeroOracle {
public:
    CommonZeroOracle(std::span<const MonotoneOperator> ops, DykstraConfig cfg = {});

    [[nodiscard]] std::span<const ConvexSet> zero_sets() const noexcept { return sets_; }
    [[nodiscard]] Vector project(const Vector& x) const;
    [[nodiscard]] double distance(const Vector& x) const;

private:
    std::vector<ConvexSet> sets_;
    DykstraConfig cfg_;
};

/// x_{k+1} = J_{lambda_k T}(x_k).
Trace run_proximal_point(const MonotoneOperator& T, const Vector& x0, const RunConfig& cfg);

/// x_{k+1} = J_{lambda_k T_i}(x_k) with i uniform on {0, ..., m-1}, drawn
/// from std::mt19937_64 seeded with cfg.seed.
Trace run_randomized_proximal(std::span<const MonotoneOperator> ops, const Vector& x0, const RunConfig& cfg);

/// x_{k+1} = (1/m) sum_i J_{lambda_k T_i}(x_k), summed left to right in
/// index order.
Trace run_barycentric_proximal(std::span<const MonotoneOperator> ops, const Vector& x0, const RunConfig& cfg);

/// One barycentric step at fixed lambda.
Vector barycentric_map(std::span<const Resolvent> resolvents, const Vector& x);

struct MarginRow {
    int k = 0;
    double observed = 0.0;
    double bound = 0.0;
    double margin = 0.0;  // bound - observed
    bool passed = true;
};

struct SingleRateCheck {
    double bound = 0.0;
    std::vector<MarginRow> rows;
    std::optional<int> first_violation;
    Trace trace;

    [[nodiscard]] bool passed() const { return !first_violation.has_value(); }
};

/// Runs the classical method with a constant lambda and checks every
/// ratio_sq_k (with dist_k > 1e-12) against gamma_bar^2/(lambda^2+gamma_bar^2)
/// + 1e-9. The caller supplies gamma_bar above the true modulus.
SingleRateCheck verify_rate_single(const MonotoneOperator& T, const Vector& x0, const RunConfig& cfg,
                                   double gamma_bar);

/// Per-iteration statistics across randomized trials.
struct StepStatistic {
    int k = 0;
    std::size_t contributing = 0;  // trials with a defined ratio at k
    // Plain Monte-Carlo estimate: mean of dist_{k+1}^2 / dist_k^2.
    double sampled_mean = 0.0;
    double sampled_stderr = 0.0;
    bool sampled_checked = false;  // only with >= kMinSampledTrials contributors
    bool sampled_passed = true;
    // Branch-enumerated estimate: mean over trials of
    // (1/m) sum_i d(J_i x_k)^2 / dist_k^2, the exact conditional ratio at each
    // visited x_k.
    double conditional_mean = 0.0;
    double conditional_stderr = 0.0;
    double conditional_max = 0.0;
    bool conditional_passed = true;
    double bound = 0.0;
};

inline constexpr std::size_t kMinSampledTrials = 30;

struct MultiRateCheck {
    RateReport rate;
    std::vector<StepStatistic> steps;
    std::size_t n_trials = 0;
    std::size_t monotonicity_violations = 0;
    std::size_t trials_reaching_1e6 = 0;  // final dist <= 1e-6
    std::optional<int> first_failed_step;

    [[nodiscard]] bool passed() const { return monotonicity_violations == 0 && !first_failed_step; }
};

/// The multi-operator gate: throws AssumptionError unless lambda^2 > 3 gamma_bar^2.
void require_rate_assumption(double lambda, double gamma_bar);

/// Runs n_trials (>= 100) randomized trials, trial t seeded with
/// derive_seed(cfg.seed, t), and checks the expected contraction bound at
/// every iteration: mean <= rate + 3 standard errors, for the branch-enumerated
/// estimator always and for the plain sampled estimator where at least
/// kMinSampledTrials trials contribute. Also counts per-trial violations of
/// dist_{k+1} <= dist_k + 1e-12. Requires a constant schedule.
MultiRateCheck verify_rate_multi(std::span<const MonotoneOperator> ops, const Vector& x0, const RunConfig& cfg,
                                 double kappa_bar, double gamma_bar, std::size_t n_trials,
                                 kernels::Execution exec = kernels::Execution::parallel);

struct JensenRow {
    int k = 0;
    double barycentric_dist_sq = 0.0;  // d(x_{k+1}^BP)^2
    double branch_mean_dist_sq = 0.0;  // (1/m) sum_i d(J_i x_k^BP)^2
    double bary_ratio_sq = 0.0;
    bool jensen_passed = true;
    bool rate_passed = true;
};

struct BarycentricComparison {
    RateReport rate;
    Trace barycentric;
    std::vector<JensenRow> rows;
    /// Mean over randomized trials of dist_k^2, indexed by k (trials that
    /// stopped early contribute their terminal distance).
    std::vector<double> randomized_mean_dist_sq;
    std::optional<int> first_violation;

    [[nodiscard]] bool passed() const { return !first_violation.has_value(); }
};

/// One barycentric trace checked step by step against the enumerated branch
/// average (Jensen, slack 1e-10) and against the multi-operator rate
/// (+1e-9), plus n_trials randomized runs from the same start for reference.
BarycentricComparison compare_barycentric(std::span<const MonotoneOperator> ops, const Vector& x0,
                                          const RunConfig& cfg, double kappa_bar, double gamma_bar,
                                          std::size_t n_trials,
                                          kernels::Execution exec = kernels::Execution::parallel);

} // namespace proxreg
