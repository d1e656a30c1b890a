#pragma once

#include "proxreg/hilbert.hpp"
#include "proxreg/kernels.hpp"
#include "proxreg/sets.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <variant>

namespace proxreg {

class MonotoneOperator;

/// T(x) = {A x}; requires A + A^T positive semidefinite.
struct LinearOp {
    Matrix A;
};

/// T = N_S.
struct NormalConeOp {
    ConvexSet set;
};

/// T = grad f for f(x) = x^T Q x / 2 + c^T x, Q symmetric PSD, -c in range(Q).
struct SubdiffQuadratic {
    Matrix Q;
    Vector c;
};

/// T = subdifferential of w |.|_1 on R^dim.
struct SubdiffL1 {
    double weight = 1.0;
    Eigen::Index dim = 1;
};

/// T(x) = base(x) - b. The base must have an affine zero set (linear,
/// quadratic, or another shift of those) so the zero set stays exact.
struct Shifted {
    std::shared_ptr<const MonotoneOperator> base;
    Vector b;
};

/// Maximal monotone operator on R^n with exact resolvent, minimum-norm
/// element and zero-set oracles. Immutable once constructed; the zero set is
/// computed (and its existence checked) at construction.
class MonotoneOperator {
public:
    using Variant = std::variant<LinearOp, NormalConeOp, SubdiffQuadratic, SubdiffL1, Shifted>;

    MonotoneOperator(LinearOp op);
    MonotoneOperator(NormalConeOp op);
    MonotoneOperator(SubdiffQuadratic op);
    MonotoneOperator(SubdiffL1 op);
    MonotoneOperator(Shifted op);

    [[nodiscard]] Eigen::Index dim() const noexcept { return zero_set_->dim(); }
    [[nodiscard]] const Variant& kind_data() const noexcept { return data_; }
    [[nodiscard]] std::string_view kind() const noexcept;

    /// T^{-1}(0).
    [[nodiscard]] const ConvexSet& zero_set() const noexcept { return *zero_set_; }

    /// The element of T(x) of least norm, or nullopt when T(x) is empty.
    [[nodiscard]] std::optional<Vector> min_norm_selection(const Vector& x) const;

    /// Membership of v in T(x), with slack `tol` on each defining equation or
    /// inequality (normal cones use in_normal_cone with 200 probes).
    [[nodiscard]] bool graph_contains(const Vector& x, const Vector& v, double tol) const;

    /// Affine part (M, q) with T(x) = M x + q, for linear, quadratic and
    /// shifted operators; nullopt otherwise.
    [[nodiscard]] std::optional<std::pair<Matrix, Vector>> affine_form() const;

private:
    Variant data_;
    std::shared_ptr<const ConvexSet> zero_set_;
};

/// d(0, T(x)); +infinity when T(x) is empty.
double min_norm_element(const MonotoneOperator& T, const Vector& x);

const ConvexSet& zero_set(const MonotoneOperator& T);

/// d(x, T^{-1}(0)).
double zero_distance(const MonotoneOperator& T, const Vector& x);

/// J_{lambda T} = (I + lambda T)^{-1}. Linear systems are factorized once at
/// construction.
class Resolvent {
public:
    Resolvent(std::shared_ptr<const MonotoneOperator> op, double lambda);
    Resolvent(const MonotoneOperator& op, double lambda);

    [[nodiscard]] double lambda() const noexcept { return lambda_; }
    [[nodiscard]] const MonotoneOperator& op() const noexcept { return *op_; }

    /// The unique y with x in y + lambda T(y).
    [[nodiscard]] Vector apply(const Vector& x) const;
    [[nodiscard]] Vector operator()(const Vector& x) const { return apply(x); }

private:
    struct Factorization;

    std::shared_ptr<const MonotoneOperator> op_;
    double lambda_;
    std::shared_ptr<const Factorization> factor_;
    std::shared_ptr<const Resolvent> inner_;  // resolvent of the base of a shift
};

Vector resolve(const Resolvent& R, const Vector& x);

struct FirmNonexpansivenessReport {
    std::size_t pairs = 0;
    std::size_t violations = 0;
    /// max over pairs of |Jx-Jy|^2 + |(x-Jx)-(y-Jy)|^2 - |x-y|^2.
    double worst_excess = -std::numeric_limits<double>::infinity();
};

/// Evaluates the firm non-expansiveness inequality on `pairs` random pairs
/// (Gaussian, scale `spread`, around `center`) with additive slack `slack`.
FirmNonexpansivenessReport check_firm_nonexpansiveness(const Resolvent& R, const Vector& center, double spread,
                                                       std::size_t pairs, std::uint64_t seed,
                                                       double slack = 1e-10,
                                                       kernels::Execution exec = kernels::Execution::parallel);

} // namespace proxreg
