#include "proxreg/regularity.hpp"

#include "proxreg/errors.hpp"
#include "proxreg/linalg.hpp"
#include "proxreg/random.hpp"

#include <cmath>
#include <string>

namespace proxreg {

namespace {

void require_positive(double value, const char* name)
{
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw DomainError(std::string(name) + " must be positive and finite");
    }
}

void check_sampling_inputs(const Vector& center, double radius, std::size_t n_samples)
{
    require_finite(center, "center");
    require_positive(radius, "radius");
    if (n_samples < 1) {
        throw DomainError("n_samples must be at least 1");
    }
}

} // namespace

Vector regularity_sample(const Vector& center, double radius, std::uint64_t seed, std::size_t i)
{
    Engine rng(derive_seed(seed, i));
    return uniform_in_ball(rng, center, radius);
}

std::optional<double> subregularity_ratio(const MonotoneOperator& T, const Vector& x)
{
    const double residual = min_norm_element(T, x);
    if (!std::isfinite(residual) || residual <= kRatioDenominatorCutoff) {
        return std::nullopt;
    }
    return zero_distance(T, x) / residual;
}

RegularityEstimate estimate_subregularity_modulus(const MonotoneOperator& T, const Vector& center, double radius,
                                                  std::size_t n_samples, std::uint64_t seed,
                                                  kernels::Execution exec)
{
    check_sampling_inputs(center, radius, n_samples);
    if (center.size() != T.dim()) {
        throw DimensionError("estimate_subregularity_modulus: center dimension does not match the operator");
    }
    if (zero_distance(T, center) > 1e-8) {
        throw DomainError("estimate_subregularity_modulus: center is not a zero of the operator");
    }
    const auto stats = kernels::max_ratio(exec, n_samples, [&](std::size_t i) {
        return subregularity_ratio(T, regularity_sample(center, radius, seed, i));
    });
    return {stats.max_ratio, center, radius, stats.used, stats.skipped};
}

double spectral_modulus(const MonotoneOperator& T)
{
    const auto affine = T.affine_form();
    if (!affine) {
        throw DomainError("spectral_modulus: operator '" + std::string(T.kind()) + "' has no affine form");
    }
    const LeastSquares ls(affine->first);
    return ls.rank > 0 ? 1.0 / ls.sigma_min_kept : 0.0;
}

double product_residual(std::span<const ConvexSet> zero_sets, const Vector& x)
{
    double sum = 0.0;
    for (const auto& s : zero_sets) {
        const double d = s.distance(x);
        sum += d * d;
    }
    return std::sqrt(sum);
}

RegularityEstimate estimate_kappa(std::span<const ConvexSet> zero_sets, const Vector& center, double radius,
                                  std::size_t n_samples, std::uint64_t seed, const DykstraConfig& cfg,
                                  kernels::Execution exec)
{
    check_sampling_inputs(center, radius, n_samples);
    if (zero_sets.empty()) {
        throw DomainError("estimate_kappa: no sets");
    }
    for (const auto& s : zero_sets) {
        if (s.dim() != center.size()) {
            throw DimensionError("estimate_kappa: center dimension does not match the sets");
        }
    }
    if (max_set_distance(zero_sets, center) > 1e-8) {
        throw DomainError("estimate_kappa: center is not in the intersection");
    }
    const auto stats = kernels::max_ratio(exec, n_samples, [&](std::size_t i) -> std::optional<double> {
        const Vector x = regularity_sample(center, radius, seed, i);
        const double residual = product_residual(zero_sets, x);
        if (residual <= kRatioDenominatorCutoff) {
            return std::nullopt;
        }
        return (x - dykstra_project(zero_sets, x, cfg)).norm() / residual;
    });
    return {stats.max_ratio, center, radius, stats.used, stats.skipped};
}

double theoretical_rate_single(double gamma_bar, double lambda)
{
    require_positive(gamma_bar, "gamma_bar");
    require_positive(lambda, "lambda");
    const double g2 = gamma_bar * gamma_bar;
    return g2 / (lambda * lambda + g2);
}

RateReport theoretical_rate_multi(int m, double kappa_bar, double gamma_bar, double lambda)
{
    if (m < 1) {
        throw DomainError("m must be at least 1");
    }
    require_positive(kappa_bar, "kappa_bar");
    const double single = theoretical_rate_single(gamma_bar, lambda);
    const double scale = 1.0 / (static_cast<double>(m) * kappa_bar * kappa_bar);
    RateReport report;
    report.rate = 1.0 - scale + 2.0 * scale * std::sqrt(single);
    report.assumption_ok = lambda * lambda > 3.0 * gamma_bar * gamma_bar;
    report.m = m;
    report.kappa_bar = kappa_bar;
    report.gamma_bar = gamma_bar;
    report.lambda = lambda;
    return report;
}

} // namespace proxreg
