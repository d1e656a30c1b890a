#include "proxreg/sets.hpp"

#include "proxreg/errors.hpp"
#include "proxreg/random.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace proxreg {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr int kMaxVertexEnumerationDim = 12;

// Orthonormal basis of the orthogonal complement of a (a != 0).
Matrix complement_basis(const Vector& a)
{
    const LeastSquares ls(Matrix(a.transpose()));
    return ls.null_basis;
}

} // namespace

ConvexSet::ConvexSet(Box box) : shape_(std::move(box)) { validate(); }
ConvexSet::ConvexSet(Halfspace halfspace) : shape_(std::move(halfspace)) { validate(); }
ConvexSet::ConvexSet(Hyperplane hyperplane) : shape_(std::move(hyperplane)) { validate(); }
ConvexSet::ConvexSet(Ball ball) : shape_(std::move(ball)) { validate(); }
ConvexSet::ConvexSet(AffineSubspace subspace) : shape_(std::move(subspace)) { validate(); }
ConvexSet::ConvexSet(Singleton singleton) : shape_(std::move(singleton)) { validate(); }
ConvexSet::ConvexSet(FullSpace space) : shape_(space) { validate(); }

void ConvexSet::validate()
{
    std::visit(
        Overloaded{
            [this](const Box& s) {
                require_finite(s.lower, "box.lower");
                require_finite(s.upper, "box.upper");
                require_same_dim(s.lower, s.upper, "box bounds");
                if ((s.lower.array() > s.upper.array()).any()) {
                    throw DomainError("box: lower must not exceed upper");
                }
                dim_ = s.lower.size();
            },
            [this](const Halfspace& s) {
                require_finite(s.a, "halfspace.a");
                if (!std::isfinite(s.b) || s.a.norm() == 0.0) {
                    throw DomainError("halfspace: normal must be nonzero and offset finite");
                }
                dim_ = s.a.size();
                directions_ = complement_basis(s.a);
            },
            [this](const Hyperplane& s) {
                require_finite(s.a, "hyperplane.a");
                if (!std::isfinite(s.b) || s.a.norm() == 0.0) {
                    throw DomainError("hyperplane: normal must be nonzero and offset finite");
                }
                dim_ = s.a.size();
                directions_ = complement_basis(s.a);
            },
            [this](const Ball& s) {
                require_finite(s.center, "ball.center");
                if (!std::isfinite(s.radius) || s.radius < 0.0) {
                    throw DomainError("ball: radius must be finite and nonnegative");
                }
                dim_ = s.center.size();
            },
            [this](const AffineSubspace& s) {
                if (s.A.cols() == 0 || s.A.rows() == 0) {
                    throw DomainError("affine subspace: A must be nonempty");
                }
                if (!s.A.allFinite() || !s.b.allFinite()) {
                    throw DomainError("affine subspace: entries must be finite");
                }
                if (s.A.rows() != s.b.size()) {
                    throw DimensionError("affine subspace: A has " + std::to_string(s.A.rows()) +
                                         " rows but b has " + std::to_string(s.b.size()) + " entries");
                }
                dim_ = s.A.cols();
                solver_ = std::make_shared<const LeastSquares>(s.A);
                const Vector residual = s.A * solver_->solve(s.b) - s.b;
                if (residual.norm() > 1e-10 * (1.0 + s.b.norm())) {
                    throw DomainError("affine subspace: system A x = b is inconsistent (residual " +
                                      std::to_string(residual.norm()) + ")");
                }
                directions_ = solver_->null_basis;
            },
            [this](const Singleton& s) {
                require_finite(s.point, "singleton.point");
                dim_ = s.point.size();
                directions_ = Matrix(dim_, 0);
            },
            [this](const FullSpace& s) {
                if (s.dim < 1) {
                    throw DomainError("full space: dimension must be at least 1");
                }
                dim_ = s.dim;
                directions_ = Matrix::Identity(dim_, dim_);
            },
        },
        shape_);
}

std::string_view ConvexSet::kind() const noexcept
{
    return std::visit(Overloaded{
                          [](const Box&) { return std::string_view("box"); },
                          [](const Halfspace&) { return std::string_view("halfspace"); },
                          [](const Hyperplane&) { return std::string_view("hyperplane"); },
                          [](const Ball&) { return std::string_view("ball"); },
                          [](const AffineSubspace&) { return std::string_view("affine"); },
                          [](const Singleton&) { return std::string_view("singleton"); },
                          [](const FullSpace&) { return std::string_view("full_space"); },
                      },
                      shape_);
}

bool ConvexSet::is_affine() const noexcept
{
    return std::holds_alternative<Hyperplane>(shape_) || std::holds_alternative<AffineSubspace>(shape_) ||
           std::holds_alternative<Singleton>(shape_) || std::holds_alternative<FullSpace>(shape_);
}

const Matrix& ConvexSet::direction_basis() const noexcept { return directions_; }

Vector ConvexSet::project(const Vector& x) const
{
    if (x.size() != dim_) {
        throw DimensionError("project: point has dimension " + std::to_string(x.size()) + " but set has " +
                             std::to_string(dim_));
    }
    return std::visit(Overloaded{
                          [&](const Box& s) -> Vector { return x.cwiseMax(s.lower).cwiseMin(s.upper); },
                          [&](const Halfspace& s) -> Vector {
                              const double excess = s.a.dot(x) - s.b;
                              if (excess <= 0.0) {
                                  return x;
                              }
                              return x - (excess / s.a.squaredNorm()) * s.a;
                          },
                          [&](const Hyperplane& s) -> Vector {
                              return x - ((s.a.dot(x) - s.b) / s.a.squaredNorm()) * s.a;
                          },
                          [&](const Ball& s) -> Vector {
                              const Vector offset = x - s.center;
                              const double len = offset.norm();
                              if (len <= s.radius) {
                                  return x;
                              }
                              return s.center + (s.radius / len) * offset;
                          },
                          [&](const AffineSubspace& s) -> Vector { return x - solver_->solve(s.A * x - s.b); },
                          [&](const Singleton& s) -> Vector { return s.point; },
                          [&](const FullSpace&) -> Vector { return x; },
                      },
                      shape_);
}

double ConvexSet::distance(const Vector& x) const { return (x - project(x)).norm(); }

bool ConvexSet::contains(const Vector& x) const { return distance(x) <= membership_tolerance(x); }

Vector project(const ConvexSet& set, const Vector& x) { return set.project(x); }

double set_distance(const ConvexSet& set, const Vector& x) { return set.distance(x); }

bool in_normal_cone(const ConvexSet& set, const Vector& z, const Vector& v, int probe_count)
{
    if (probe_count < 1) {
        throw std::invalid_argument("in_normal_cone: probe_count must be at least 1");
    }
    if (z.size() != set.dim() || v.size() != set.dim()) {
        throw DimensionError("in_normal_cone: dimension mismatch");
    }
    if (!set.contains(z)) {
        throw DomainError("in_normal_cone: base point is not in the set");
    }

    const double slack = 1e-10 * (1.0 + v.norm());
    const double reach = 1.0 + z.norm();
    const auto n = set.dim();
    bool refuted = false;
    auto probe = [&](const Vector& s) {
        if (!refuted && v.dot(s - z) > slack) {
            refuted = true;
        }
    };
    // Probes along +-basis directions of a direction space, plus along the
    // component of v inside it.
    auto probe_directions = [&](const Vector& base, const Matrix& basis) {
        for (Eigen::Index j = 0; j < basis.cols(); ++j) {
            probe(base + reach * basis.col(j));
            probe(base - reach * basis.col(j));
        }
        if (basis.cols() > 0) {
            const Vector along = basis * (basis.transpose() * v);
            if (along.norm() > 0.0) {
                probe(base + (reach / along.norm()) * along);
            }
        }
    };

    Engine rng(derive_seed(0x6e6f726d616cULL, static_cast<std::uint64_t>(probe_count)));
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    std::visit(
        Overloaded{
            [&](const Box& s) {
                Vector support(n);
                for (Eigen::Index i = 0; i < n; ++i) {
                    support[i] = v[i] > 0.0 ? s.upper[i] : s.lower[i];
                }
                probe(support);
                if (n <= kMaxVertexEnumerationDim) {
                    const std::uint64_t vertices = std::uint64_t{1} << n;
                    for (std::uint64_t mask = 0; mask < vertices && !refuted; ++mask) {
                        Vector corner(n);
                        for (Eigen::Index i = 0; i < n; ++i) {
                            corner[i] = (mask >> i) & 1U ? s.upper[i] : s.lower[i];
                        }
                        probe(corner);
                    }
                }
                for (int t = 0; t < probe_count && !refuted; ++t) {
                    Vector s_in(n);
                    for (Eigen::Index i = 0; i < n; ++i) {
                        s_in[i] = s.lower[i] + unif(rng) * (s.upper[i] - s.lower[i]);
                    }
                    probe(s_in);
                }
            },
            [&](const Halfspace& s) {
                const Vector unit = s.a / s.a.norm();
                const Vector boundary = z - ((s.a.dot(z) - s.b) / s.a.squaredNorm()) * s.a;
                const Matrix& tangent = set.direction_basis();
                probe(boundary);
                probe(boundary - reach * unit);
                probe_directions(boundary, tangent);
                for (int t = 0; t < probe_count && !refuted; ++t) {
                    const Vector g = gaussian_vector(rng, tangent.cols(), reach);
                    probe(boundary + tangent * g - (reach * unif(rng)) * unit);
                }
            },
            [&](const Hyperplane& s) {
                const Matrix& tangent = set.direction_basis();
                const Vector base = z - ((s.a.dot(z) - s.b) / s.a.squaredNorm()) * s.a;
                probe_directions(base, tangent);
                for (int t = 0; t < probe_count && !refuted; ++t) {
                    probe(base + tangent * gaussian_vector(rng, tangent.cols(), reach));
                }
            },
            [&](const Ball& s) {
                if (v.norm() > 0.0) {
                    probe(s.center + (s.radius / v.norm()) * v);
                }
                for (Eigen::Index i = 0; i < n; ++i) {
                    probe(s.center + s.radius * Vector::Unit(n, i));
                    probe(s.center - s.radius * Vector::Unit(n, i));
                }
                for (int t = 0; t < probe_count && !refuted; ++t) {
                    Vector dir = gaussian_vector(rng, n);
                    if (dir.norm() == 0.0) {
                        continue;
                    }
                    dir.normalize();
                    probe(s.center + s.radius * dir);
                    probe(uniform_in_ball(rng, s.center, s.radius));
                }
            },
            [&](const AffineSubspace&) {
                const Matrix& directions = set.direction_basis();
                const Vector base = set.project(z);
                probe(base);
                probe_directions(base, directions);
                for (int t = 0; t < probe_count && !refuted; ++t) {
                    probe(base + directions * gaussian_vector(rng, directions.cols(), reach));
                }
            },
            [&](const Singleton& s) { probe(s.point); },
            [&](const FullSpace&) {
                probe_directions(z, set.direction_basis());
                for (int t = 0; t < probe_count && !refuted; ++t) {
                    probe(z + gaussian_vector(rng, n, reach));
                }
            },
        },
        set.shape());

    return !refuted;
}

double max_set_distance(std::span<const ConvexSet> sets, const Vector& x)
{
    double worst = 0.0;
    for (const auto& s : sets) {
        worst = std::max(worst, s.distance(x));
    }
    return worst;
}

Vector project_affine_intersection(std::span<const ConvexSet> sets, const Vector& x)
{
    if (sets.empty()) {
        throw std::invalid_argument("project_affine_intersection: no sets");
    }
    const auto n = x.size();
    Eigen::Index rows = 0;
    for (const auto& s : sets) {
        if (s.dim() != n) {
            throw DimensionError("project_affine_intersection: dimension mismatch");
        }
        if (!s.is_affine()) {
            throw DomainError("project_affine_intersection: " + std::string(s.kind()) + " is not affine");
        }
        rows += std::visit(Overloaded{
                               [](const Hyperplane&) -> Eigen::Index { return 1; },
                               [](const AffineSubspace& a) -> Eigen::Index { return a.A.rows(); },
                               [n](const Singleton&) -> Eigen::Index { return n; },
                               [](const auto&) -> Eigen::Index { return 0; },
                           },
                           s.shape());
    }
    if (rows == 0) {
        return x;
    }

    Matrix M(rows, n);
    Vector rhs(rows);
    Eigen::Index at = 0;
    for (const auto& s : sets) {
        std::visit(Overloaded{
                       [&](const Hyperplane& h) {
                           M.row(at) = h.a.transpose();
                           rhs[at] = h.b;
                           at += 1;
                       },
                       [&](const AffineSubspace& a) {
                           M.middleRows(at, a.A.rows()) = a.A;
                           rhs.segment(at, a.A.rows()) = a.b;
                           at += a.A.rows();
                       },
                       [&](const Singleton& p) {
                           M.middleRows(at, n) = Matrix::Identity(n, n);
                           rhs.segment(at, n) = p.point;
                           at += n;
                       },
                       [](const auto&) {},
                   },
                   s.shape());
    }
    const LeastSquares ls(M);
    const Vector residual = M * ls.solve(rhs) - rhs;
    if (residual.norm() > 1e-8 * (1.0 + rhs.norm())) {
        throw DomainError("project_affine_intersection: affine sets do not intersect");
    }
    return x - ls.solve(M * x - rhs);
}

Vector dykstra_project(std::span<const ConvexSet> sets, const Vector& x, const DykstraConfig& cfg)
{
    if (sets.empty()) {
        throw std::invalid_argument("dykstra_project: no sets");
    }
    if (cfg.max_sweeps < 1 || !(cfg.tolerance > 0.0)) {
        throw std::invalid_argument("dykstra_project: max_sweeps >= 1 and tolerance > 0 required");
    }
    for (const auto& s : sets) {
        if (s.dim() != x.size()) {
            throw DimensionError("dykstra_project: point has dimension " + std::to_string(x.size()) +
                                 " but a set has " + std::to_string(s.dim()));
        }
    }
    if (sets.size() == 1) {
        return sets.front().project(x);
    }
    if (max_set_distance(sets, x) <= cfg.tolerance) {
        return x;
    }

    Vector y = x;
    std::vector<Vector> increments(sets.size(), Vector::Zero(x.size()));
    bool converged = false;
    for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
        // Feasible iterates may still be far from the projection; stop only
        // once a whole sweep leaves y and every increment in place.
        const Vector y_before = y;
        double change = 0.0;
        for (std::size_t i = 0; i < sets.size(); ++i) {
            const Vector shifted = y + increments[i];
            y = sets[i].project(shifted);
            Vector next_increment = shifted - y;
            change = std::max(change, (next_increment - increments[i]).norm());
            increments[i] = std::move(next_increment);
        }
        change = std::max(change, (y - y_before).norm());
        if (change <= cfg.tolerance && max_set_distance(sets, y) <= cfg.tolerance) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw ConvergenceError("dykstra_project: not stationary within " + std::to_string(cfg.tolerance) +
                               " after " + std::to_string(cfg.max_sweeps) +
                               " sweeps (empty or ill-conditioned intersection)");
    }

    const bool all_affine = std::all_of(sets.begin(), sets.end(), [](const ConvexSet& s) { return s.is_affine(); });
    if (all_affine) {
        const Vector closed_form = project_affine_intersection(sets, x);
        if ((closed_form - y).norm() > 1e-8 * (1.0 + x.norm())) {
            throw ConvergenceError("dykstra_project: result disagrees with the least-squares closed form");
        }
    }
    return y;
}

} // namespace proxreg
