#include "gridfluct/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>

#include "gridfluct/errors.hpp"

namespace gridfluct {

namespace {

constexpr double kHurwitzTol = -1e-12;

void check_inputs(const Matrix& A, const Matrix& W) {
    if (A.rows() != A.cols()) throw ShapeError("lyapunov: A must be square");
    if (W.rows() != A.rows() || W.cols() != A.cols()) throw ShapeError("lyapunov: W must match A");
}

double require_hurwitz(const Matrix& A) {
    const double abscissa = spectral_abscissa(A);
    if (!(abscissa < kHurwitzTol)) {
        std::ostringstream msg;
        msg << "system matrix is not Hurwitz (max real eigenvalue part " << abscissa << ")";
        throw InstabilityError(msg.str());
    }
    return abscissa;
}

// Start offsets and sizes of the 1x1 / 2x2 diagonal blocks of a real quasi-triangular matrix.
std::vector<std::pair<Eigen::Index, Eigen::Index>> schur_blocks(const Matrix& T) {
    std::vector<std::pair<Eigen::Index, Eigen::Index>> blocks;
    const Eigen::Index n = T.rows();
    Eigen::Index i = 0;
    while (i < n) {
        if (i + 1 < n && T(i + 1, i) != 0.0) {
            blocks.emplace_back(i, 2);
            i += 2;
        } else {
            blocks.emplace_back(i, 1);
            i += 1;
        }
    }
    return blocks;
}

}  // namespace

double spectral_abscissa(const Matrix& A) {
    if (A.size() == 0) return -std::numeric_limits<double>::infinity();
    Eigen::EigenSolver<Matrix> es(A, false);
    if (es.info() != Eigen::Success) throw NumericalError("eigenvalue computation failed");
    return es.eigenvalues().real().maxCoeff();
}

double lyapunov_residual(const Matrix& A, const Matrix& Q, const Matrix& W) {
    const double wn = W.norm();
    const double r = (A * Q + Q * A.transpose() + W).norm();
    return wn > 0 ? r / wn : r;
}

LyapunovSolution lyapunov_solve(const Matrix& A, const Matrix& W) {
    check_inputs(A, W);
    LyapunovSolution out;
    out.spectral_abscissa = require_hurwitz(A);
    const Eigen::Index n = A.rows();
    if (n == 0) return out;

    Eigen::RealSchur<Matrix> schur(A);
    if (schur.info() != Eigen::Success) throw NumericalError("real Schur decomposition failed");
    const Matrix& T = schur.matrixT();
    const Matrix& U = schur.matrixU();

    // T Y + Y T^T = C with C = -U^T W U, Y = U^T Q U.
    const Matrix C = -(U.transpose() * W * U);
    Matrix Y = Matrix::Zero(n, n);
    const auto blocks = schur_blocks(T);
    const auto nb = static_cast<std::ptrdiff_t>(blocks.size());

    for (std::ptrdiff_t bk = nb - 1; bk >= 0; --bk) {
        const auto [k0, p] = blocks[bk];
        for (std::ptrdiff_t bl = nb - 1; bl >= 0; --bl) {
            const auto [l0, q] = blocks[bl];
            Matrix rhs = C.block(k0, l0, p, q);
            const Eigen::Index kend = k0 + p;
            const Eigen::Index lend = l0 + q;
            if (kend < n) rhs -= T.block(k0, kend, p, n - kend) * Y.block(kend, l0, n - kend, q);
            if (lend < n) rhs -= Y.block(k0, lend, p, n - lend) * T.block(l0, lend, q, n - lend).transpose();

            // (I_q (x) T_kk + T_ll (x) I_p) vec(Y_kl) = vec(rhs)
            const Matrix Tkk = T.block(k0, k0, p, p);
            const Matrix Tll = T.block(l0, l0, q, q);
            Matrix K = Matrix::Zero(p * q, p * q);
            for (Eigen::Index c = 0; c < q; ++c) {
                K.block(c * p, c * p, p, p) += Tkk;
                for (Eigen::Index r = 0; r < q; ++r) K.block(r * p, c * p, p, p).diagonal().array() += Tll(r, c);
            }
            const Vector v = Eigen::Map<const Vector>(rhs.data(), p * q);
            const Vector y = K.fullPivLu().solve(v);
            Y.block(k0, l0, p, q) = Eigen::Map<const Matrix>(y.data(), p, q);
        }
    }

    Matrix Q = U * Y * U.transpose();
    Q = 0.5 * (Q + Q.transpose());
    out.solution = std::move(Q);
    out.relative_residual = lyapunov_residual(A, out.solution, W);
    return out;
}

LyapunovSolution lyapunov_solve_kronecker(const Matrix& A, const Matrix& W) {
    check_inputs(A, W);
    LyapunovSolution out;
    out.spectral_abscissa = require_hurwitz(A);
    const Eigen::Index n = A.rows();
    if (n == 0) return out;
    const Eigen::Index N = n * n;
    Matrix K = Matrix::Zero(N, N);
    // vec(A Q) = (I (x) A) vec Q ; vec(Q A^T) = (A (x) I) vec Q
    for (Eigen::Index j = 0; j < n; ++j) K.block(j * n, j * n, n, n) += A;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (A(i, j) != 0.0) K.block(i * n, j * n, n, n).diagonal().array() += A(i, j);
    const Vector rhs = -Eigen::Map<const Vector>(W.data(), N);
    const Vector q = K.partialPivLu().solve(rhs);
    Matrix Q = Eigen::Map<const Matrix>(q.data(), n, n);
    Q = 0.5 * (Q + Q.transpose());
    out.solution = std::move(Q);
    out.relative_residual = lyapunov_residual(A, out.solution, W);
    return out;
}

}  // namespace gridfluct
