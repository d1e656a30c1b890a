#pragma once

#include <Eigen/Dense>

#include <string_view>

namespace proxreg {

// Points of R^n with the Euclidean inner product.
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Throws DimensionError unless x and y have the same length.
void require_same_dim(const Vector& x, const Vector& y, std::string_view what = "operands");

/// Throws DomainError if x is empty or has a NaN/Inf coordinate.
void require_finite(const Vector& x, std::string_view what = "vector");

double inner(const Vector& x, const Vector& y);
double norm(const Vector& x);
double squared_norm(const Vector& x);
double dist(const Vector& x, const Vector& y);

/// Membership slack used by every set and operator check: 1e-10 (1 + |x|).
double membership_tolerance(const Vector& x);

} // namespace proxreg
