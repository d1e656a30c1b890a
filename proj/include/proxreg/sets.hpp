#pragma once

#include "proxreg/hilbert.hpp"
#include "proxreg/linalg.hpp"

#include <memory>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace proxreg {

struct Box {
    Vector lower;
    Vector upper;
};

/// {x : <a, x> <= b}
struct Halfspace {
    Vector a;
    double b = 0.0;
};

/// {x : <a, x> = b}
struct Hyperplane {
    Vector a;
    double b = 0.0;
};

struct Ball {
    Vector center;
    double radius = 0.0;
};

/// {x : A x = b}. Rank decisions use the SVD cutoff 1e-10 * sigma_max.
struct AffineSubspace {
    Matrix A;
    Vector b;
};

struct Singleton {
    Vector point;
};

struct FullSpace {
    Eigen::Index dim = 0;
};

/// Closed, convex, nonempty subset of R^n with an exact projection.
///
/// Values are immutable; copies share the precomputed factorization of
/// affine variants.
class ConvexSet {
public:
    using Variant = std::variant<Box, Halfspace, Hyperplane, Ball, AffineSubspace, Singleton, FullSpace>;

    ConvexSet(Box box);
    ConvexSet(Halfspace halfspace);
    ConvexSet(Hyperplane hyperplane);
    ConvexSet(Ball ball);
    ConvexSet(AffineSubspace subspace);
    ConvexSet(Singleton singleton);
    ConvexSet(FullSpace space);

    [[nodiscard]] Eigen::Index dim() const noexcept { return dim_; }
    [[nodiscard]] const Variant& shape() const noexcept { return shape_; }
    [[nodiscard]] std::string_view kind() const noexcept;

    /// True for hyperplanes, affine subspaces, singletons and the full space.
    [[nodiscard]] bool is_affine() const noexcept;

    [[nodiscard]] Vector project(const Vector& x) const;
    [[nodiscard]] double distance(const Vector& x) const;
    [[nodiscard]] bool contains(const Vector& x) const;

    /// Orthonormal basis (columns) of the direction space of an affine variant;
    /// empty for non-affine variants.
    [[nodiscard]] const Matrix& direction_basis() const noexcept;

private:
    void validate();

    Variant shape_;
    Eigen::Index dim_ = 0;
    std::shared_ptr<const LeastSquares> solver_;
    Matrix directions_;
};

Vector project(const ConvexSet& set, const Vector& x);
double set_distance(const ConvexSet& set, const Vector& x);

/// Sampling-based falsification of v in N_S(z): probes points s in S and
/// reports false as soon as <v, s - z> > 1e-10 (1 + |v|). Probes always
/// include every vertex of a box (up to 12 dimensions), the support point of
/// v when it exists, and tangent/recession directions of unbounded variants,
/// so polyhedral cases are decided exactly. `probe_count` random members of
/// S are added on top. Throws DomainError if z is not in S.
bool in_normal_cone(const ConvexSet& set, const Vector& z, const Vector& v, int probe_count);

struct DykstraConfig {
    int max_sweeps = 10000;
    /// Stop when a sweep moves y and every increment by at most `tolerance`
    /// and max_i d(y, S_i) <= tolerance.
    double tolerance = 1e-12;
};

/// Projection onto the intersection of `sets` by Dykstra's algorithm.
/// Throws ConvergenceError when the sweep budget runs out, which is how an
/// empty (or badly conditioned) intersection shows up. For collections made
/// only of affine sets the result is cross-checked against
/// project_affine_intersection.
Vector dykstra_project(std::span<const ConvexSet> sets, const Vector& x, const DykstraConfig& cfg = {});

/// Closed-form projection onto an intersection of affine sets via the
/// stacked least-squares system. Throws DomainError for non-affine members.
Vector project_affine_intersection(std::span<const ConvexSet> sets, const Vector& x);

/// Largest distance from x to any member of `sets`.
double max_set_distance(std::span<const ConvexSet> sets, const Vector& x);

} // namespace proxreg
