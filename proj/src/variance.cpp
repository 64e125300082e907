#include "gridfluct/variance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gridfluct/errors.hpp"
#include "gridfluct/lyapunov.hpp"

namespace gridfluct {

namespace {

void require_connected(const LinearizedSystem& lin) {
    if (!is_connected(lin.graph)) throw ConnectivityError("graph is not connected");
}

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

bool uniform(const Vector& v, double rel_tol) {
    const double ref = v(0);
    return ((v.array() - ref).abs() <= rel_tol * std::abs(ref)).all();
}

}  // namespace

std::string method_name(Method m) {
    switch (m) {
        case Method::numeric: return "numeric";
        case Method::uniform_ratio: return "uniform";
        case Method::closed_form: return "closed";
        case Method::first_order: return "first-order";
        case Method::monte_carlo: return "mc";
    }
    return "unknown";
}

ReducedSystem reduce_system(const LinearizedSystem& lin) {
    require_connected(lin);
    return reduce_system(lin, whitened_spectrum(lin.laplacian, lin.inertia));
}

ReducedSystem reduce_system(const LinearizedSystem& lin, const SpectralDecomposition& spectral) {
    require_connected(lin);
    const auto n = static_cast<Eigen::Index>(lin.node_count());
    const auto m = static_cast<Eigen::Index>(lin.line_count());
    const Matrix& U = spectral.vectors;
    if (U.rows() != n || U.cols() != n || spectral.eigenvalues.size() != n)
        throw ShapeError("reduce_system: spectral decomposition does not match the network");
    const Vector minv_sqrt = lin.inertia.array().rsqrt();
    const Vector ratio = lin.damping.array() / lin.inertia.array();

    Matrix Ae = Matrix::Zero(2 * n, 2 * n);
    Ae.topRightCorner(n, n).setIdentity();
    Ae.bottomLeftCorner(n, n).diagonal() = -spectral.eigenvalues;
    Ae.bottomRightCorner(n, n) = -(U.transpose() * ratio.asDiagonal() * U);

    Matrix Be = Matrix::Zero(2 * n, n);
    Be.bottomRows(n) = U.transpose() * (minv_sqrt.array() * lin.noise.array()).matrix().asDiagonal();

    Matrix Ce = Matrix::Zero(m + n, 2 * n);
    Ce.topLeftCorner(m, n) = lin.incidence.transpose() * minv_sqrt.asDiagonal() * U;
    Ce.bottomRightCorner(n, n) = minv_sqrt.asDiagonal() * U;

    ReducedSystem rs;
    rs.a2 = Ae.bottomRightCorner(2 * n - 1, 2 * n - 1);
    rs.b2 = Be.bottomRows(2 * n - 1);
    rs.c2 = Ce.rightCols(2 * n - 1);
    rs.spectral = spectral;
    return rs;
}

CovarianceReport asymptotic_variance_numeric(const LinearizedSystem& lin) {
    require_connected(lin);
    return asymptotic_variance_numeric(lin, whitened_spectrum(lin.laplacian, lin.inertia));
}

CovarianceReport asymptotic_variance_numeric(const LinearizedSystem& lin, const SpectralDecomposition& spectral) {
    const ReducedSystem rs = reduce_system(lin, spectral);
    const LyapunovSolution sol = lyapunov_solve(rs.a2, rs.b2 * rs.b2.transpose());
    if (!(sol.relative_residual <= 1e-9)) {
        std::ostringstream msg;
        msg << "Lyapunov residual " << sol.relative_residual << " exceeds 1e-9";
        throw NumericalError(msg.str());
    }
    const Matrix Qy = rs.c2 * sol.solution * rs.c2.transpose();
    const auto n = static_cast<Eigen::Index>(lin.node_count());
    const auto m = static_cast<Eigen::Index>(lin.line_count());
    CovarianceReport rep;
    rep.method = Method::numeric;
    rep.q_delta = symmetrized(Qy.topLeftCorner(m, m));
    rep.q_omega = symmetrized(Qy.bottomRightCorner(n, n));
    rep.q_delta_omega = Qy.bottomLeftCorner(n, m);
    rep.lyapunov_residual = sol.relative_residual;
    return rep;
}

double uniform_ratio(const Vector& inertia, const Vector& damping) {
    const Vector r = damping.array() / inertia.array();
    const double alpha = r.mean();
    std::string offenders;
    for (Eigen::Index i = 0; i < r.size(); ++i)
        if (std::abs(r(i) - alpha) > 1e-9 * alpha) offenders += (offenders.empty() ? "" : ", ") + std::to_string(i + 1);
    if (!offenders.empty())
        throw AssumptionViolatedError("uniform damping-inertia ratio violated at nodes " + offenders);
    return alpha;
}

UniformRatioBlocks uniform_ratio_blocks(const LinearizedSystem& lin, const SpectralDecomposition& spectral) {
    const double alpha = uniform_ratio(lin.inertia, lin.damping);
    const auto n = static_cast<Eigen::Index>(lin.node_count());
    const Matrix& U = spectral.vectors;
    const Vector& lam = spectral.eigenvalues;
    const Vector xi = lin.noise.array().square() / lin.inertia.array();
    const Matrix X = U.transpose() * xi.asDiagonal() * U;
    const double a2 = alpha * alpha;

    UniformRatioBlocks blk;
    blk.alpha = alpha;
    blk.chi.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            blk.chi(i, j) = (lam(i) - lam(j)) * (lam(i) - lam(j)) + 2.0 * a2 * (lam(i) + lam(j));
    blk.rho = (2.0 * a2 + lam.tail(n - 1).array()).matrix();

    blk.s = Matrix::Zero(n - 1, n);
    blk.g = Matrix::Zero(n - 1, n - 1);
    blk.r = Matrix::Zero(n, n);
    for (Eigen::Index i = 1; i < n; ++i) {
        blk.s(i - 1, 0) = X(i, 0) / blk.rho(i - 1);
        for (Eigen::Index j = 1; j < n; ++j) {
            blk.s(i - 1, j) = (lam(i) - lam(j)) / blk.chi(i, j) * X(i, j);
            blk.g(i - 1, j - 1) = 2.0 * alpha / blk.chi(i, j) * X(i, j);
        }
    }
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            blk.r(i, j) = (i == 0 && j == 0) ? X(0, 0) / (2.0 * alpha)
                                             : alpha * (lam(i) + lam(j)) / blk.chi(i, j) * X(i, j);
    return blk;
}

CovarianceReport asymptotic_variance_uniform_ratio(const LinearizedSystem& lin) {
    require_connected(lin);
    uniform_ratio(lin.inertia, lin.damping);
    return asymptotic_variance_uniform_ratio(lin, whitened_spectrum(lin.laplacian, lin.inertia));
}

CovarianceReport asymptotic_variance_uniform_ratio(const LinearizedSystem& lin,
                                                   const SpectralDecomposition& spectral) {
    require_connected(lin);
    const UniformRatioBlocks blk = uniform_ratio_blocks(lin, spectral);
    const auto n = static_cast<Eigen::Index>(lin.node_count());
    const Vector minv_sqrt = lin.inertia.array().rsqrt();
    const Matrix MU = minv_sqrt.asDiagonal() * spectral.vectors;          // M^{-1/2} U
    const Matrix CU = lin.incidence.transpose() * MU.rightCols(n - 1);    // C^T M^{-1/2} U_hat

    CovarianceReport rep;
    rep.method = Method::uniform_ratio;
    rep.q_delta = symmetrized(CU * blk.g * CU.transpose());
    rep.q_omega = symmetrized(MU * blk.r * MU.transpose());
    rep.q_delta_omega = MU * blk.s.transpose() * CU.transpose();
    return rep;
}

FirstOrderVariance first_order_variance(const LinearizedSystem& lin) {
    require_connected(lin);
    const auto n = static_cast<Eigen::Index>(lin.node_count());
    FirstOrderVariance fo;
    fo.spectral = whitened_spectrum(lin.laplacian, lin.damping);
    const Vector dinv_sqrt = lin.damping.array().rsqrt();
    const Matrix DU = dinv_sqrt.asDiagonal() * fo.spectral.vectors.rightCols(n - 1);
    const Vector b2 = lin.noise.array().square();
    const Matrix X = DU.transpose() * b2.asDiagonal() * DU;
    const Vector lam = fo.spectral.eigenvalues.tail(n - 1);
    fo.q_x.resize(n - 1, n - 1);
    for (Eigen::Index i = 0; i < n - 1; ++i)
        for (Eigen::Index j = 0; j < n - 1; ++j) fo.q_x(i, j) = X(i, j) / (lam(i) + lam(j));
    const Matrix CU = lin.incidence.transpose() * DU;
    fo.q_delta = symmetrized(CU * fo.q_x * CU.transpose());
    return fo;
}

CovarianceReport to_report(const FirstOrderVariance& fo) {
    CovarianceReport rep;
    rep.method = Method::first_order;
    rep.q_delta = fo.q_delta;
    return rep;
}

double trace_frequency_variance(const LinearizedSystem& lin, bool verify) {
    if (!uniform(lin.inertia, 1e-12) || !uniform(lin.damping, 1e-12))
        throw AssumptionViolatedError("trace law requires identical inertia and identical damping at every node");
    const double value = lin.noise.squaredNorm() / (2.0 * lin.damping(0) * lin.inertia(0));
    if (verify) {
        const double numeric = asymptotic_variance_numeric(lin).q_omega.trace();
        if (std::abs(numeric - value) > 1e-9 * std::max(std::abs(value), 1e-300)) {
            std::ostringstream msg;
            msg << "trace law check failed: numeric " << numeric << " vs " << value;
            throw NumericalError(msg.str());
        }
    }
    return value;
}

double relative_discrepancy(const Matrix& a, const Matrix& ref) {
    if (a.rows() != ref.rows() || a.cols() != ref.cols()) throw ShapeError("relative_discrepancy: shape mismatch");
    if (ref.size() == 0) return 0.0;
    const double diff = max_abs(a - ref);
    if (diff == 0.0) return 0.0;
    const double scale = max_abs(ref);
    return scale > 0.0 ? diff / scale : std::numeric_limits<double>::infinity();
}

double report_discrepancy(const CovarianceReport& a, const CovarianceReport& ref) {
    double worst = 0.0;
    auto blk = [&](const Matrix& x, const Matrix& y) {
        if (x.size() > 0 && y.size() > 0) worst = std::max(worst, relative_discrepancy(x, y));
    };
    blk(a.q_delta, ref.q_delta);
    blk(a.q_omega, ref.q_omega);
    blk(a.q_delta_omega, ref.q_delta_omega);
    return worst;
}

}  // namespace gridfluct
