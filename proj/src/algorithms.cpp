#include "proxreg/algorithms.hpp"

#include "proxreg/errors.hpp"
#include "proxreg/random.hpp"

#include <cmath>
#include <functional>
#include <sstream>
#include <string>

namespace proxreg {

LambdaSchedule LambdaSchedule::constant(double lambda)
{
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw DomainError("lambda schedule: lambda must be positive and finite");
    }
    return {Kind::constant, lambda, 1.0};
}

LambdaSchedule LambdaSchedule::geometric(double lambda0, double factor)
{
    if (!(lambda0 > 0.0) || !std::isfinite(lambda0)) {
        throw DomainError("lambda schedule: lambda0 must be positive and finite");
    }
    if (!(factor > 1.0) || !std::isfinite(factor)) {
        throw DomainError("lambda schedule: geometric factor must exceed 1");
    }
    return {Kind::geometric, lambda0, factor};
}

double LambdaSchedule::at(int k) const
{
    if (kind_ == Kind::constant) {
        return lambda0_;
    }
    return lambda0_ * std::pow(factor_, k);
}

void RunConfig::validate() const
{
    if (max_iters < 1) {
        throw DomainError("run config: max_iters must be at least 1");
    }
    if (!(residual_tol > 0.0)) {
        throw DomainError("run config: residual_tol must be positive");
    }
}

CommonZeroOracle::CommonZeroOracle(std::span<const MonotoneOperator> ops, DykstraConfig cfg) : cfg_(cfg)
{
    if (ops.empty()) {
        throw DomainError("at least one operator is required");
    }
    sets_.reserve(ops.size());
    for (const auto& op : ops) {
        if (op.dim() != ops.front().dim()) {
            throw DimensionError("operators act on different dimensions");
        }
        sets_.push_back(op.zero_set());
    }
}

Vector CommonZeroOracle::project(const Vector& x) const { return dykstra_project(sets_, x, cfg_); }

double CommonZeroOracle::distance(const Vector& x) const { return (x - project(x)).norm(); }

namespace {

// Non-owning handle; resolvents built from it never outlive the run.
std::shared_ptr<const MonotoneOperator> borrow(const MonotoneOperator& op)
{
    return {std::shared_ptr<const void>(), &op};
}

// Resolvents for every operator at the current lambda, rebuilt (and
// refactorized) only when lambda changes.
class ResolventBank {
public:
    explicit ResolventBank(std::span<const MonotoneOperator> ops) : ops_(ops) {}

    const std::vector<Resolvent>& at(double lambda)
    {
        if (resolvents_.empty() || lambda != lambda_) {
            resolvents_.clear();
            resolvents_.reserve(ops_.size());
            for (const auto& op : ops_) {
                resolvents_.emplace_back(borrow(op), lambda);
            }
            lambda_ = lambda;
        }
        return resolvents_;
    }

private:
    std::span<const MonotoneOperator> ops_;
    std::vector<Resolvent> resolvents_;
    double lambda_ = 0.0;
};

struct Step {
    Vector next;
    std::optional<std::size_t> chosen;
};

using StepFn = std::function<Step(const Vector& x, double lambda)>;
using DistanceFn = std::function<double(const Vector& x)>;

Trace iterate(const Vector& x0, const RunConfig& cfg, const DistanceFn& distance, const StepFn& step)
{
    cfg.validate();
    require_finite(x0, "x0");
    Trace trace;
    Vector x = x0;
    double d = distance(x);
    for (int k = 0;; ++k) {
        IterationRecord rec;
        rec.k = k;
        rec.lambda = cfg.schedule.at(k);
        rec.x = x;
        rec.dist = d;
        if (d <= cfg.residual_tol || k == cfg.max_iters) {
            trace.status = d <= cfg.residual_tol ? RunStatus::converged : RunStatus::budget_exhausted;
            trace.records.push_back(std::move(rec));
            break;
        }
        Step s = step(x, rec.lambda);
        const double d_next = distance(s.next);
        rec.residual = (x - s.next).norm() / rec.lambda;
        rec.chosen_index = s.chosen;
        if (d > kRatioDistFloor) {
            rec.ratio_sq = (d_next * d_next) / (d * d);
        }
        trace.records.push_back(std::move(rec));
        x = std::move(s.next);
        d = d_next;
    }
    return trace;
}

double branch_mean_dist_sq(std::span<const Resolvent> resolvents, const CommonZeroOracle& oracle, const Vector& x)
{
    double sum = 0.0;
    for (const auto& R : resolvents) {
        const double d = oracle.distance(R.apply(x));
        sum += d * d;
    }
    return sum / static_cast<double>(resolvents.size());
}

void require_same_dims(std::span<const MonotoneOperator> ops, const Vector& x0)
{
    if (ops.empty()) {
        throw DomainError("at least one operator is required");
    }
    for (const auto& op : ops) {
        if (op.dim() != x0.size()) {
            throw DimensionError("x0 has dimension " + std::to_string(x0.size()) + " but an operator acts on " +
                                 std::to_string(op.dim()));
        }
    }
}

double constant_lambda(const RunConfig& cfg)
{
    if (cfg.schedule.kind() != LambdaSchedule::Kind::constant) {
        throw DomainError("rate verification requires a constant lambda schedule");
    }
    return cfg.schedule.lambda0();
}

struct MeanStd {
    double mean = 0.0;
    double stderr_ = 0.0;
    double max = 0.0;
};

MeanStd summarize(const std::vector<double>& values)
{
    MeanStd out;
    if (values.empty()) {
        return out;
    }
    const auto n = static_cast<double>(values.size());
    double sum = 0.0;
    for (const double v : values) {
        sum += v;
        out.max = std::max(out.max, v);
    }
    out.mean = sum / n;
    if (values.size() > 1) {
        double ss = 0.0;
        for (const double v : values) {
            ss += (v - out.mean) * (v - out.mean);
        }
        out.stderr_ = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    return out;
}

} // namespace

Vector barycentric_map(std::span<const Resolvent> resolvents, const Vector& x)
{
    if (resolvents.empty()) {
        throw DomainError("barycentric_map: no resolvents");
    }
    Vector sum = resolvents.front().apply(x);
    for (std::size_t i = 1; i < resolvents.size(); ++i) {
        sum += resolvents[i].apply(x);
    }
    return sum / static_cast<double>(resolvents.size());
}

Trace run_proximal_point(const MonotoneOperator& T, const Vector& x0, const RunConfig& cfg)
{
    require_same_dims(std::span(&T, 1), x0);
    ResolventBank bank(std::span(&T, 1));
    return iterate(
        x0, cfg, [&](const Vector& x) { return zero_distance(T, x); },
        [&](const Vector& x, double lambda) { return Step{bank.at(lambda).front().apply(x), std::nullopt}; });
}

Trace run_randomized_proximal(std::span<const MonotoneOperator> ops, const Vector& x0, const RunConfig& cfg)
{
    require_same_dims(ops, x0);
    const CommonZeroOracle oracle(ops);
    ResolventBank bank(ops);
    Engine rng(cfg.seed);
    std::uniform_int_distribution<std::size_t> pick(0, ops.size() - 1);
    return iterate(
        x0, cfg, [&](const Vector& x) { return oracle.distance(x); },
        [&](const Vector& x, double lambda) {
            const std::size_t i = pick(rng);
            return Step{bank.at(lambda)[i].apply(x), i};
        });
}

Trace run_barycentric_proximal(std::span<const MonotoneOperator> ops, const Vector& x0, const RunConfig& cfg)
{
    require_same_dims(ops, x0);
    const CommonZeroOracle oracle(ops);
    ResolventBank bank(ops);
    return iterate(
        x0, cfg, [&](const Vector& x) { return oracle.distance(x); },
        [&](const Vector& x, double lambda) { return Step{barycentric_map(bank.at(lambda), x), std::nullopt}; });
}

SingleRateCheck verify_rate_single(const MonotoneOperator& T, const Vector& x0, const RunConfig& cfg,
                                   double gamma_bar)
{
    const double lambda = constant_lambda(cfg);
    SingleRateCheck check;
    check.bound = theoretical_rate_single(gamma_bar, lambda);
    check.trace = run_proximal_point(T, x0, cfg);
    for (const auto& rec : check.trace.records) {
        if (!rec.ratio_sq || rec.dist <= 1e-12) {
            continue;
        }
        MarginRow row;
        row.k = rec.k;
        row.observed = *rec.ratio_sq;
        row.bound = check.bound;
        row.margin = check.bound - row.observed;
        row.passed = row.observed <= check.bound + 1e-9;
        if (!row.passed && !check.first_violation) {
            check.first_violation = rec.k;
        }
        check.rows.push_back(row);
    }
    return check;
}

void require_rate_assumption(double lambda, double gamma_bar)
{
    if (!(lambda * lambda > 3.0 * gamma_bar * gamma_bar)) {
        std::ostringstream msg;
        msg << "assumption λ² > 3γ̄² violated (λ = " << lambda << ", γ̄ = " << gamma_bar << ")";
        throw AssumptionError(msg.str());
    }
}

MultiRateCheck verify_rate_multi(std::span<const MonotoneOperator> ops, const Vector& x0, const RunConfig& cfg,
                                 double kappa_bar, double gamma_bar, std::size_t n_trials, kernels::Execution exec)
{
    const double lambda = constant_lambda(cfg);
    MultiRateCheck check;
    check.rate = theoretical_rate_multi(static_cast<int>(ops.size()), kappa_bar, gamma_bar, lambda);
    require_rate_assumption(lambda, gamma_bar);
    if (n_trials < 100) {
        throw DomainError("verify_rate_multi: n_trials must be at least 100");
    }
    require_same_dims(ops, x0);
    check.n_trials = n_trials;

    struct TrialResult {
        Trace trace;
        std::vector<std::optional<double>> conditional;
    };
    const CommonZeroOracle oracle(ops);
    std::vector<Resolvent> resolvents;
    for (const auto& op : ops) {
        resolvents.emplace_back(borrow(op), lambda);
    }

    const auto trials = kernels::generate<TrialResult>(exec, n_trials, [&](std::size_t t) {
        RunConfig trial_cfg = cfg;
        trial_cfg.seed = derive_seed(cfg.seed, t);
        TrialResult result{run_randomized_proximal(ops, x0, trial_cfg), {}};
        result.conditional.reserve(result.trace.records.size());
        for (const auto& rec : result.trace.records) {
            if (rec.ratio_sq) {
                result.conditional.emplace_back(branch_mean_dist_sq(resolvents, oracle, rec.x) /
                                                (rec.dist * rec.dist));
            } else {
                result.conditional.emplace_back();
            }
        }
        return result;
    });

    std::size_t steps = 0;
    for (const auto& trial : trials) {
        const auto& recs = trial.trace.records;
        steps = std::max(steps, recs.size());
        for (std::size_t k = 0; k + 1 < recs.size(); ++k) {
            if (recs[k + 1].dist > recs[k].dist + 1e-12) {
                ++check.monotonicity_violations;
            }
        }
        if (trial.trace.final_dist() <= 1e-6) {
            ++check.trials_reaching_1e6;
        }
    }

    for (std::size_t k = 0; k < steps; ++k) {
        std::vector<double> sampled;
        std::vector<double> conditional;
        for (const auto& trial : trials) {
            const auto& recs = trial.trace.records;
            if (k < recs.size() && recs[k].ratio_sq) {
                sampled.push_back(*recs[k].ratio_sq);
                conditional.push_back(*trial.conditional[k]);
            }
        }
        StepStatistic stat;
        stat.k = static_cast<int>(k);
        stat.contributing = sampled.size();
        stat.bound = check.rate.rate;
        const auto s = summarize(sampled);
        const auto c = summarize(conditional);
        stat.sampled_mean = s.mean;
        stat.sampled_stderr = s.stderr_;
        stat.conditional_mean = c.mean;
        stat.conditional_stderr = c.stderr_;
        stat.conditional_max = c.max;
        stat.conditional_passed = c.mean <= check.rate.rate + 3.0 * c.stderr_;
        stat.sampled_checked = sampled.size() >= kMinSampledTrials;
        stat.sampled_passed = !stat.sampled_checked || s.mean <= check.rate.rate + 3.0 * s.stderr_;
        if ((!stat.conditional_passed || !stat.sampled_passed) && !check.first_failed_step) {
            check.first_failed_step = stat.k;
        }
        check.steps.push_back(stat);
    }
    return check;
}

BarycentricComparison compare_barycentric(std::span<const MonotoneOperator> ops, const Vector& x0,
                                          const RunConfig& cfg, double kappa_bar, double gamma_bar,
                                          std::size_t n_trials, kernels::Execution exec)
{
    const double lambda = constant_lambda(cfg);
    BarycentricComparison cmp;
    cmp.rate = theoretical_rate_multi(static_cast<int>(ops.size()), kappa_bar, gamma_bar, lambda);
    require_rate_assumption(lambda, gamma_bar);
    if (n_trials < 100) {
        throw DomainError("compare_barycentric: n_trials must be at least 100");
    }
    require_same_dims(ops, x0);

    const CommonZeroOracle oracle(ops);
    std::vector<Resolvent> resolvents;
    for (const auto& op : ops) {
        resolvents.emplace_back(borrow(op), lambda);
    }
    cmp.barycentric = run_barycentric_proximal(ops, x0, cfg);
    const auto& recs = cmp.barycentric.records;
    for (std::size_t k = 0; k + 1 < recs.size(); ++k) {
        JensenRow row;
        row.k = recs[k].k;
        row.barycentric_dist_sq = recs[k + 1].dist * recs[k + 1].dist;
        row.branch_mean_dist_sq = branch_mean_dist_sq(resolvents, oracle, recs[k].x);
        row.jensen_passed = row.barycentric_dist_sq <= row.branch_mean_dist_sq + 1e-10;
        const double d_sq = recs[k].dist * recs[k].dist;
        row.bary_ratio_sq = recs[k].ratio_sq.value_or(0.0);
        row.rate_passed = row.barycentric_dist_sq <= cmp.rate.rate * d_sq + 1e-9 * d_sq;
        if ((!row.jensen_passed || !row.rate_passed) && !cmp.first_violation) {
            cmp.first_violation = row.k;
        }
        cmp.rows.push_back(row);
    }

    const auto trials = kernels::generate<Trace>(exec, n_trials, [&](std::size_t t) {
        RunConfig trial_cfg = cfg;
        trial_cfg.seed = derive_seed(cfg.seed, t);
        return run_randomized_proximal(ops, x0, trial_cfg);
    });
    std::size_t steps = 0;
    for (const auto& trial : trials) {
        steps = std::max(steps, trial.records.size());
    }
    cmp.randomized_mean_dist_sq.assign(steps, 0.0);
    for (const auto& trial : trials) {
        for (std::size_t k = 0; k < steps; ++k) {
            const double d = trial.records[std::min(k, trial.records.size() - 1)].dist;
            cmp.randomized_mean_dist_sq[k] += d * d;
        }
    }
    for (auto& v : cmp.randomized_mean_dist_sq) {
        v /= static_cast<double>(n_trials);
    }
    return cmp;
}

} // namespace proxreg
