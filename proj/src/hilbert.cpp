#include "proxreg/hilbert.hpp"

#include "proxreg/errors.hpp"

#include <string>

namespace proxreg {

void require_same_dim(const Vector& x, const Vector& y, std::string_view what)
{
    if (x.size() != y.size()) {
        throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(x.size()) +
                             " vs " + std::to_string(y.size()) + ")");
    }
}

void require_finite(const Vector& x, std::string_view what)
{
    if (x.size() == 0) {
        throw DomainError(std::string(what) + ": dimension must be at least 1");
    }
    if (!x.allFinite()) {
        throw DomainError(std::string(what) + ": coordinates must be finite");
    }
}

double inner(const Vector& x, const Vector& y)
{
    require_same_dim(x, y, "inner");
    return x.dot(y);
}

double norm(const Vector& x) { return x.norm(); }

double squared_norm(const Vector& x) { return x.squaredNorm(); }

double dist(const Vector& x, const Vector& y)
{
    require_same_dim(x, y, "dist");
    return (x - y).norm();
}

double membership_tolerance(const Vector& x) { return 1e-10 * (1.0 + x.norm()); }

} // namespace proxreg
