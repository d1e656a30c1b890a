#pragma once

#include "proxreg/kernels.hpp"
#include "proxreg/operators.hpp"
#include "proxreg/sets.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace proxreg {

/// Sampled lower estimate of a subregularity modulus around `center`.
struct RegularityEstimate {
    double modulus = 0.0;  // max ratio over used samples; 0 if none
    Vector center;
    double radius = 0.0;
    std::size_t samples_used = 0;
    std::size_t samples_skipped = 0;
};

struct RateReport {
    double rate = 0.0;
    bool assumption_ok = false;
    int m = 1;
    double kappa_bar = 0.0;
    double gamma_bar = 0.0;
    double lambda = 0.0;
};

/// Ratios below this denominator are skipped, never counted as 0 or inf.
inline constexpr double kRatioDenominatorCutoff = 1e-12;

/// Sample i of an estimator seeded with `seed`: uniform in center + radius B.
Vector regularity_sample(const Vector& center, double radius, std::uint64_t seed, std::size_t i);

/// max over samples x near `center` of d(x, T^{-1}(0)) / d(0, T(x)).
/// Samples where d(0, T(x)) is infinite or <= 1e-12 are skipped.
/// Requires center in T^{-1}(0) within 1e-8.
RegularityEstimate estimate_subregularity_modulus(const MonotoneOperator& T, const Vector& center, double radius,
                                                  std::size_t n_samples, std::uint64_t seed,
                                                  kernels::Execution exec = kernels::Execution::parallel);

/// Per-sample ratio used by estimate_subregularity_modulus (nullopt when skipped).
std::optional<double> subregularity_ratio(const MonotoneOperator& T, const Vector& x);

/// Exact modulus 1 / sigma_min^+ for operators with an affine form.
/// Throws DomainError for other variants.
double spectral_modulus(const MonotoneOperator& T);

/// d(0, Phi(x)) for Phi(x) = [S_1 - x, ..., S_m - x]: sqrt(sum_i d(x, S_i)^2).
double product_residual(std::span<const ConvexSet> zero_sets, const Vector& x);

/// max over samples of d(x, cap S_i) / d(0, Phi(x)); distances to the
/// intersection come from dykstra_project.
RegularityEstimate estimate_kappa(std::span<const ConvexSet> zero_sets, const Vector& center, double radius,
                                  std::size_t n_samples, std::uint64_t seed, const DykstraConfig& cfg = {},
                                  kernels::Execution exec = kernels::Execution::parallel);

/// gamma_bar^2 / (lambda^2 + gamma_bar^2).
double theoretical_rate_single(double gamma_bar, double lambda);

/// 1 - 1/(m kappa_bar^2) + 2/(m kappa_bar^2) sqrt(gamma_bar^2/(lambda^2+gamma_bar^2)),
/// with assumption_ok = lambda^2 > 3 gamma_bar^2.
RateReport theoretical_rate_multi(int m, double kappa_bar, double gamma_bar, double lambda);

} // namespace proxreg
