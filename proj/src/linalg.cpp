#include "proxreg/linalg.hpp"

#include "proxreg/errors.hpp"

#include <Eigen/SVD>

namespace proxreg {

LeastSquares::LeastSquares(const Matrix& A)
{
    const Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sigma = svd.singularValues();
    const auto n = A.cols();
    sigma_max = sigma.size() > 0 ? sigma[0] : 0.0;
    const double cutoff = kRankCutoff * sigma_max;
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
        if (sigma[i] > cutoff && sigma[i] > 0.0) {
            rank = i + 1;
        }
    }
    sigma_min_kept = rank > 0 ? sigma[rank - 1] : 0.0;

    const Matrix& U = svd.matrixU();
    const Matrix& V = svd.matrixV();
    pinv = Matrix::Zero(n, A.rows());
    for (Eigen::Index i = 0; i < rank; ++i) {
        pinv.noalias() += (V.col(i) / sigma[i]) * U.col(i).transpose();
    }
    null_basis = V.rightCols(n - rank);
}

double min_symmetric_eigenvalue(const Matrix& A)
{
    if (A.rows() != A.cols()) {
        throw DimensionError("matrix must be square");
    }
    const Matrix sym = 0.5 * (A + A.transpose());
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
}

} // namespace proxreg
