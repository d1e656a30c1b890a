#include "proxreg/operators.hpp"

#include "proxreg/errors.hpp"
#include "proxreg/random.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <cmath>
#include <limits>
#include <string>

namespace proxreg {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kMonotonicitySlack = 1e-10;

void require_square(const Matrix& M, std::string_view what)
{
    if (M.rows() == 0 || M.rows() != M.cols()) {
        throw DimensionError(std::string(what) + ": matrix must be square and nonempty");
    }
    if (!M.allFinite()) {
        throw DomainError(std::string(what) + ": entries must be finite");
    }
}

void require_monotone(const Matrix& A, std::string_view what)
{
    const double lowest = min_symmetric_eigenvalue(A);
    if (lowest < -kMonotonicitySlack) {
        throw DomainError(std::string(what) + ": not monotone, smallest eigenvalue of (A + A^T)/2 is " +
                          std::to_string(lowest));
    }
}

} // namespace

MonotoneOperator::MonotoneOperator(LinearOp op) : data_(std::move(op))
{
    const auto& A = std::get<LinearOp>(data_).A;
    require_square(A, "linear operator");
    require_monotone(A, "linear operator");
    zero_set_ = std::make_shared<const ConvexSet>(AffineSubspace{A, Vector::Zero(A.rows())});
}

MonotoneOperator::MonotoneOperator(NormalConeOp op) : data_(std::move(op))
{
    zero_set_ = std::make_shared<const ConvexSet>(std::get<NormalConeOp>(data_).set);
}

MonotoneOperator::MonotoneOperator(SubdiffQuadratic op) : data_(std::move(op))
{
    const auto& [Q, c] = std::get<SubdiffQuadratic>(data_);
    require_square(Q, "quadratic subdifferential");
    if (c.size() != Q.rows()) {
        throw DimensionError("quadratic subdifferential: Q is " + std::to_string(Q.rows()) + "x" +
                             std::to_string(Q.cols()) + " but c has " + std::to_string(c.size()) + " entries");
    }
    require_finite(c, "quadratic subdifferential c");
    if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
        throw DomainError("quadratic subdifferential: Q must be symmetric");
    }
    require_monotone(Q, "quadratic subdifferential");
    try {
        zero_set_ = std::make_shared<const ConvexSet>(AffineSubspace{Q, -c});
    } catch (const DomainError&) {
        throw DomainError("quadratic subdifferential: -c is not in the range of Q, so no zero exists");
    }
}

MonotoneOperator::MonotoneOperator(SubdiffL1 op) : data_(op)
{
    if (!(op.weight > 0.0) || !std::isfinite(op.weight)) {
        throw DomainError("l1 subdifferential: weight must be positive and finite");
    }
    if (op.dim < 1) {
        throw DomainError("l1 subdifferential: dimension must be at least 1");
    }
    zero_set_ = std::make_shared<const ConvexSet>(Singleton{Vector::Zero(op.dim)});
}

MonotoneOperator::MonotoneOperator(Shifted op) : data_(std::move(op))
{
    const auto& s = std::get<Shifted>(data_);
    if (!s.base) {
        throw DomainError("shifted operator: missing base");
    }
    require_finite(s.b, "shifted operator b");
    if (s.b.size() != s.base->dim()) {
        throw DimensionError("shifted operator: b has " + std::to_string(s.b.size()) +
                             " entries but the base acts on dimension " + std::to_string(s.base->dim()));
    }
    const auto affine = s.base->affine_form();
    if (!affine) {
        throw DomainError("shifted operator: base '" + std::string(s.base->kind()) +
                          "' has no affine zero set; only linear, quadratic or shifted bases are supported");
    }
    try {
        zero_set_ = std::make_shared<const ConvexSet>(AffineSubspace{affine->first, s.b - affine->second});
    } catch (const DomainError&) {
        throw DomainError("shifted operator: base(x) = b has no solution");
    }
}

std::string_view MonotoneOperator::kind() const noexcept
{
    return std::visit(Overloaded{
                          [](const LinearOp&) { return std::string_view("linear"); },
                          [](const NormalConeOp&) { return std::string_view("normal_cone"); },
                          [](const SubdiffQuadratic&) { return std::string_view("subdiff_quadratic"); },
                          [](const SubdiffL1&) { return std::string_view("subdiff_l1"); },
                          [](const Shifted&) { return std::string_view("shifted"); },
                      },
                      data_);
}

std::optional<std::pair<Matrix, Vector>> MonotoneOperator::affine_form() const
{
    return std::visit(Overloaded{
                          [](const LinearOp& op) -> std::optional<std::pair<Matrix, Vector>> {
                              return std::pair{op.A, Vector(Vector::Zero(op.A.rows()))};
                          },
                          [](const SubdiffQuadratic& op) -> std::optional<std::pair<Matrix, Vector>> {
                              return std::pair{op.Q, op.c};
                          },
                          [](const Shifted& op) -> std::optional<std::pair<Matrix, Vector>> {
                              auto base = op.base->affine_form();
                              base->second -= op.b;
                              return base;
                          },
                          [](const auto&) -> std::optional<std::pair<Matrix, Vector>> { return std::nullopt; },
                      },
                      data_);
}

std::optional<Vector> MonotoneOperator::min_norm_selection(const Vector& x) const
{
    if (x.size() != dim()) {
        throw DimensionError("operator evaluated at a point of dimension " + std::to_string(x.size()) +
                             ", expected " + std::to_string(dim()));
    }
    return std::visit(Overloaded{
                          [&](const LinearOp& op) -> std::optional<Vector> { return Vector(op.A * x); },
                          [&](const SubdiffQuadratic& op) -> std::optional<Vector> { return Vector(op.Q * x + op.c); },
                          [&](const SubdiffL1& op) -> std::optional<Vector> {
                              Vector v(x.size());
                              for (Eigen::Index i = 0; i < x.size(); ++i) {
                                  v[i] = x[i] > 0.0 ? op.weight : (x[i] < 0.0 ? -op.weight : 0.0);
                              }
                              return v;
                          },
                          [&](const NormalConeOp& op) -> std::optional<Vector> {
                              if (!op.set.contains(x)) {
                                  return std::nullopt;
                              }
                              return Vector(Vector::Zero(x.size()));
                          },
                          [&](const Shifted& op) -> std::optional<Vector> {
                              auto v = op.base->min_norm_selection(x);
                              *v -= op.b;
                              return v;
                          },
                      },
                      data_);
}

bool MonotoneOperator::graph_contains(const Vector& x, const Vector& v, double tol) const
{
    require_same_dim(x, v, "graph_contains");
    return std::visit(Overloaded{
                          [&](const SubdiffL1& op) {
                              for (Eigen::Index i = 0; i < x.size(); ++i) {
                                  if (x[i] != 0.0) {
                                      const double slope = x[i] > 0.0 ? op.weight : -op.weight;
                                      if (std::abs(v[i] - slope) > tol) {
                                          return false;
                                      }
                                  } else if (std::abs(v[i]) > op.weight + tol) {
                                      return false;
                                  }
                              }
                              return true;
                          },
                          [&](const NormalConeOp& op) {
                              return op.set.contains(x) && in_normal_cone(op.set, x, v, 200);
                          },
                          [&](const auto&) { return (v - *min_norm_selection(x)).norm() <= tol; },
                      },
                      data_);
}

double min_norm_element(const MonotoneOperator& T, const Vector& x)
{
    if (const auto& nc = std::get_if<NormalConeOp>(&T.kind_data())) {
        if (x.size() != nc->set.dim()) {
            throw DimensionError("min_norm_element: dimension mismatch");
        }
        return nc->set.contains(x) ? 0.0 : std::numeric_limits<double>::infinity();
    }
    if (const auto& l1 = std::get_if<SubdiffL1>(&T.kind_data())) {
        if (x.size() != l1->dim) {
            throw DimensionError("min_norm_element: dimension mismatch");
        }
        const auto active = static_cast<double>((x.array() != 0.0).count());
        return l1->weight * std::sqrt(active);
    }
    return T.min_norm_selection(x)->norm();
}

const ConvexSet& zero_set(const MonotoneOperator& T) { return T.zero_set(); }

double zero_distance(const MonotoneOperator& T, const Vector& x) { return T.zero_set().distance(x); }

struct Resolvent::Factorization {
    std::optional<Eigen::PartialPivLU<Matrix>> lu;
    std::optional<Eigen::LLT<Matrix>> llt;
};

Resolvent::Resolvent(const MonotoneOperator& op, double lambda)
    : Resolvent(std::make_shared<const MonotoneOperator>(op), lambda)
{
}

Resolvent::Resolvent(std::shared_ptr<const MonotoneOperator> op, double lambda) : op_(std::move(op)), lambda_(lambda)
{
    if (!op_) {
        throw DomainError("resolvent: missing operator");
    }
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw DomainError("resolvent: lambda must be positive and finite");
    }
    const auto n = op_->dim();
    std::visit(Overloaded{
                   [&](const LinearOp& op) {
                       auto f = std::make_shared<Factorization>();
                       const Matrix system = Matrix::Identity(n, n) + lambda * op.A;
                       f->lu.emplace(system);
                       if (!(f->lu->rcond() > 1e-14)) {
                           throw DomainError("resolvent: I + lambda A is numerically singular");
                       }
                       factor_ = std::move(f);
                   },
                   [&](const SubdiffQuadratic& op) {
                       auto f = std::make_shared<Factorization>();
                       f->llt.emplace(Matrix::Identity(n, n) + lambda * op.Q);
                       if (f->llt->info() != Eigen::Success) {
                           throw DomainError("resolvent: I + lambda Q is not positive definite");
                       }
                       factor_ = std::move(f);
                   },
                   [&](const Shifted& op) { inner_ = std::make_shared<const Resolvent>(op.base, lambda); },
                   [](const auto&) {},
               },
               op_->kind_data());
}

Vector Resolvent::apply(const Vector& x) const
{
    if (x.size() != op_->dim()) {
        throw DimensionError("resolvent applied to a point of dimension " + std::to_string(x.size()) +
                             ", expected " + std::to_string(op_->dim()));
    }
    return std::visit(Overloaded{
                          [&](const LinearOp&) -> Vector { return factor_->lu->solve(x); },
                          [&](const SubdiffQuadratic& op) -> Vector { return factor_->llt->solve(x - lambda_ * op.c); },
                          [&](const NormalConeOp& op) -> Vector { return op.set.project(x); },
                          [&](const SubdiffL1& op) -> Vector {
                              const double threshold = lambda_ * op.weight;
                              Vector y(x.size());
                              for (Eigen::Index i = 0; i < x.size(); ++i) {
                                  const double shrunk = std::max(std::abs(x[i]) - threshold, 0.0);
                                  y[i] = std::copysign(shrunk, x[i]);
                              }
                              return y;
                          },
                          [&](const Shifted& op) -> Vector { return inner_->apply(x + lambda_ * op.b); },
                      },
                      op_->kind_data());
}

Vector resolve(const Resolvent& R, const Vector& x) { return R.apply(x); }

FirmNonexpansivenessReport check_firm_nonexpansiveness(const Resolvent& R, const Vector& center, double spread,
                                                       std::size_t pairs, std::uint64_t seed, double slack,
                                                       kernels::Execution exec)
{
    const auto n = R.op().dim();
    if (center.size() != n) {
        throw DimensionError("check_firm_nonexpansiveness: dimension mismatch");
    }
    const auto excess = kernels::generate<double>(exec, pairs, [&](std::size_t i) {
        Engine rng(derive_seed(seed, i));
        const Vector x = center + gaussian_vector(rng, n, spread);
        const Vector y = center + gaussian_vector(rng, n, spread);
        const Vector jx = R.apply(x);
        const Vector jy = R.apply(y);
        return (jx - jy).squaredNorm() + ((x - jx) - (y - jy)).squaredNorm() - (x - y).squaredNorm();
    });
    FirmNonexpansivenessReport report;
    report.pairs = pairs;
    for (const double e : excess) {
        report.worst_excess = std::max(report.worst_excess, e);
        if (e > slack) {
            ++report.violations;
        }
    }
    return report;
}

} // namespace proxreg
