#pragma once

#include "proxreg/hilbert.hpp"

namespace proxreg {

/// Relative singular-value cutoff for every rank decision.
inline constexpr double kRankCutoff = 1e-10;

/// SVD-based least-squares data for a fixed matrix A (m x n): the
/// pseudo-inverse, the numerical rank, a null-space basis and the smallest
/// singular value kept by the cutoff 1e-10 * sigma_max.
struct LeastSquares {
    explicit LeastSquares(const Matrix& A);

    Matrix pinv;
    Matrix null_basis;  // n x (n - rank), orthonormal columns
    Eigen::Index rank = 0;
    double sigma_max = 0.0;
    double sigma_min_kept = 0.0;  // 0 when rank == 0

    /// argmin |A y - b| of minimum norm.
    [[nodiscard]] Vector solve(const Vector& b) const { return pinv * b; }
};

/// Smallest eigenvalue of (A + A^T) / 2.
double min_symmetric_eigenvalue(const Matrix& A);

} // namespace proxreg
