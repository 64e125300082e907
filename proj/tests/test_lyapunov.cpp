#include <doctest.h>

#include "gridfluct/errors.hpp"
#include "gridfluct/lyapunov.hpp"
#include "support/generators.hpp"

using namespace gridfluct;

TEST_CASE("small Lyapunov equations") {
    const LyapunovSolution s = lyapunov_solve(-Matrix::Identity(2, 2), Matrix::Identity(2, 2));
    CHECK((s.solution - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);

    Matrix a(1, 1), w(1, 1);
    a << -2;
    w << 4;
    CHECK(lyapunov_solve(a, w).solution(0, 0) == doctest::Approx(1.0).epsilon(1e-15));

    // Single machine: inertia 1, damping 2, linearized capacity 2, noise 1.
    Matrix A(2, 2), B(2, 1);
    A << 0, 1, -2, -2;
    B << 0, 1;
    const Matrix W = B * B.transpose();
    const Matrix bs = lyapunov_solve(A, W).solution;
    const Matrix kr = lyapunov_solve_kronecker(A, W).solution;
    CHECK(bs(0, 0) == doctest::Approx(0.125).epsilon(1e-14));
    CHECK(bs(1, 1) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK((bs - kr).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("non-Hurwitz and mismatched inputs are rejected") {
    Matrix A(2, 2);
    A << 0, 1, -1, 0;
    CHECK_THROWS_AS(lyapunov_solve(A, Matrix::Identity(2, 2)), InstabilityError);
    CHECK_THROWS_AS(lyapunov_solve_kronecker(A, Matrix::Identity(2, 2)), InstabilityError);
    CHECK_THROWS_AS(lyapunov_solve(-Matrix::Identity(2, 2), Matrix::Identity(3, 3)), ShapeError);
    CHECK_THROWS_AS(lyapunov_solve(Matrix::Identity(2, 3), Matrix::Identity(2, 3)), ShapeError);
}

TEST_CASE("property: Schur and Kronecker backends agree on random Hurwitz systems") {
    testgen::Rng rng(2024);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = testgen::uniform_int(rng, 1, 30);
        const Matrix A = testgen::hurwitz_matrix(rng, n);
        const Matrix W = testgen::random_psd(rng, n, testgen::uniform_int(rng, 1, n));
        const LyapunovSolution bs = lyapunov_solve(A, W);
        const LyapunovSolution kr = lyapunov_solve_kronecker(A, W);
        CHECK(bs.relative_residual <= 1e-9);
        CHECK(testgen::rel_max(bs.solution, kr.solution) <= 1e-10);
        CHECK((bs.solution - bs.solution.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * bs.solution.cwiseAbs().maxCoeff());
        Eigen::SelfAdjointEigenSolver<Matrix> es(bs.solution);
        CHECK(es.eigenvalues().minCoeff() >= -1e-10 * bs.solution.norm());
        CHECK(bs.spectral_abscissa < 0.0);
    }
}
