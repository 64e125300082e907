#pragma once

#include <string>

#include "gridfluct/graph.hpp"
#include "gridfluct/linalg.hpp"
#include "gridfluct/swing.hpp"

namespace gridfluct {

/// System in whitened spectral coordinates with the angle zero mode removed.
struct ReducedSystem {
    Matrix a2;  // (2n-1) x (2n-1)
    Matrix b2;  // (2n-1) x n
    Matrix c2;  // (m+n) x (2n-1)
    SpectralDecomposition spectral;  // of M^{-1/2} L M^{-1/2}
};

ReducedSystem reduce_system(const LinearizedSystem& lin);
/// Uses a caller-supplied decomposition of M^{-1/2} L M^{-1/2}; any orthonormal basis of
/// each eigenvalue cluster is acceptable as long as the first column spans the kernel.
ReducedSystem reduce_system(const LinearizedSystem& lin, const SpectralDecomposition& spectral);

enum class Method { numeric, uniform_ratio, closed_form, first_order, monte_carlo };

std::string method_name(Method m);

struct CovarianceReport {
    Matrix q_delta;        // m x m, lines
    Matrix q_omega;        // n x n, nodes; empty for the first-order model
    Matrix q_delta_omega;  // n x m, rows nodes, columns lines; empty when unavailable
    Method method = Method::numeric;

    double lyapunov_residual = 0.0;
    // Monte Carlo standard errors, same shapes as the blocks above when present.
    Matrix stderr_delta;
    Matrix stderr_omega;
    Matrix stderr_delta_omega;
    long long samples = 0;
};

CovarianceReport asymptotic_variance_numeric(const LinearizedSystem& lin);
CovarianceReport asymptotic_variance_numeric(const LinearizedSystem& lin, const SpectralDecomposition& spectral);

struct UniformRatioBlocks {
    Matrix g;    // (n-1) x (n-1)
    Matrix s;    // (n-1) x n
    Matrix r;    // n x n
    double alpha = 0.0;
    Vector rho;  // 2 alpha^2 + lambda_i for i = 2..n
    Matrix chi;  // (lambda_i - lambda_j)^2 + 2 alpha^2 (lambda_i + lambda_j), all i, j
};

/// Common damping-to-inertia ratio; throws AssumptionViolatedError naming the offending nodes.
double uniform_ratio(const Vector& inertia, const Vector& damping);

UniformRatioBlocks uniform_ratio_blocks(const LinearizedSystem& lin, const SpectralDecomposition& spectral);
CovarianceReport asymptotic_variance_uniform_ratio(const LinearizedSystem& lin);
CovarianceReport asymptotic_variance_uniform_ratio(const LinearizedSystem& lin, const SpectralDecomposition& spectral);

struct FirstOrderVariance {
    Matrix q_delta;  // m x m
    Matrix q_x;      // (n-1) x (n-1) in the damping-whitened spectral basis
    SpectralDecomposition spectral;  // of D^{-1/2} L D^{-1/2}
};

/// Zero-inertia (first-order) model driven by the same noise.
FirstOrderVariance first_order_variance(const LinearizedSystem& lin);
CovarianceReport to_report(const FirstOrderVariance& fo);

/// tr(B^2) / (2 d eta); requires uniform inertia and damping. With verify set the value is
/// checked against the numeric route and a NumericalError is thrown on disagreement.
double trace_frequency_variance(const LinearizedSystem& lin, bool verify = false);

/// max|a - ref| / max|ref| (0 when equal, infinity when ref is zero and a is not).
double relative_discrepancy(const Matrix& a, const Matrix& ref);
/// Largest relative_discrepancy over the blocks present in both reports.
double report_discrepancy(const CovarianceReport& a, const CovarianceReport& ref);

}  // namespace gridfluct
