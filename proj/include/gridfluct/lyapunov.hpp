#pragma once

#include "gridfluct/linalg.hpp"

namespace gridfluct {

struct LyapunovSolution {
    Matrix solution;
    double relative_residual = 0.0;  // ||AQ + QA^T + W|| / ||W||, Frobenius
    double spectral_abscissa = 0.0;  // max real part of eig(A)
};

/// Solves A Q + Q A^T + W = 0 by Bartels-Stewart on the real Schur form of A.
/// Throws InstabilityError unless max Re eig(A) < -1e-12.
LyapunovSolution lyapunov_solve(const Matrix& A, const Matrix& W);

/// Same equation through the dense Kronecker system (I (x) A + A (x) I) vec(Q) = -vec(W).
/// Intended for cross-checks at small sizes.
LyapunovSolution lyapunov_solve_kronecker(const Matrix& A, const Matrix& W);

double spectral_abscissa(const Matrix& A);
double lyapunov_residual(const Matrix& A, const Matrix& Q, const Matrix& W);

}  // namespace gridfluct
