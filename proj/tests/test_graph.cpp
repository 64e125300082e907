#include <doctest.h>

#include <cmath>

#include "gridfluct/errors.hpp"
#include "gridfluct/graph.hpp"
#include "support/generators.hpp"

using namespace gridfluct;

TEST_CASE("laplacian of small graphs") {
    Matrix expect(3, 3);
    expect << 2, -1, -1, -1, 2, -1, -1, -1, 2;
    CHECK(laplacian(canonical_complete(3, 1.0)) == expect);

    Matrix edge(2, 2);
    edge << 2, -2, -2, 2;
    CHECK(laplacian(WeightedGraph(2, {{0, 1, 2.0}})) == edge);

    Matrix star(3, 3);
    star << 2, -1, -1, -1, 1, 0, -1, 0, 1;
    CHECK(laplacian(canonical_star(3, 1.0)) == star);
}

TEST_CASE("incidence matrices follow line orientation and canonical order") {
    Matrix c3(3, 3);
    c3 << 1, 1, 0, -1, 0, 1, 0, -1, -1;
    CHECK(incidence(canonical_complete(3, 1.0)) == c3);

    const Matrix cs = incidence(canonical_star(5, 1.0));
    CHECK(cs.row(0) == Eigen::RowVectorXd::Ones(4));
    for (Eigen::Index i = 1; i < 5; ++i) {
        CHECK(cs.row(i).sum() == -1.0);
        CHECK(cs(i, i - 1) == -1.0);
    }

    Matrix single(2, 1);
    single << 1, -1;
    CHECK(incidence(WeightedGraph(2, {{0, 1, 1.0}})) == single);
}

TEST_CASE("canonical constructors") {
    CHECK(canonical_complete(5, 1.0).edge_count() == 10);
    const WeightedGraph s = canonical_star(9, 1.0);
    CHECK(s.edge_count() == 8);
    for (const Edge& e : s.edges()) CHECK((e.from == 0 || e.to == 0));
    const WeightedGraph c2 = canonical_complete(2, 3.0);
    REQUIRE(c2.edge_count() == 1);
    CHECK(c2.edge(0).weight == 3.0);
    CHECK_THROWS_AS(canonical_complete(1, 1.0), InvalidSizeError);
    CHECK_THROWS_AS(canonical_star(1, 1.0), InvalidSizeError);
}

TEST_CASE("graph validation") {
    CHECK_THROWS_AS(WeightedGraph(0, {}), InvalidSizeError);
    CHECK_THROWS_AS(WeightedGraph(2, {{0, 0, 1.0}}), InvalidGraphError);
    CHECK_THROWS_AS(WeightedGraph(2, {{0, 2, 1.0}}), InvalidGraphError);
    CHECK_THROWS_AS(WeightedGraph(2, {{0, 1, 1.0}, {1, 0, 2.0}}), InvalidGraphError);
    CHECK_THROWS_AS(WeightedGraph(2, {{0, 1, 0.0}}), InvalidGraphError);
    CHECK_THROWS_AS(WeightedGraph(2, {{0, 1, -1.0}}), InvalidGraphError);
}

TEST_CASE("connectivity") {
    CHECK_FALSE(is_connected(WeightedGraph(4, {{0, 1, 1.0}, {2, 3, 1.0}})));
    CHECK(is_connected(canonical_star(4, 1.0)));
    CHECK(is_connected(WeightedGraph(3, {{0, 1, 1.0}, {1, 2, 1.0}})));
    CHECK(algebraic_connectivity(canonical_complete(4, 1.0)) == doctest::Approx(4.0));
}

TEST_CASE("spectra of complete and star graphs") {
    const SpectralDecomposition c = whitened_spectrum(laplacian(canonical_complete(5, 2.0)), Vector::Ones(5));
    CHECK(c.eigenvalues(0) == 0.0);
    for (int i = 1; i < 5; ++i) CHECK(c.eigenvalues(i) == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(c.degeneracy_groups.size() == 2);
    CHECK(c.degeneracy_groups[1].size() == 4);

    const SpectralDecomposition s = whitened_spectrum(laplacian(canonical_star(4, 1.0)), Vector::Ones(4));
    CHECK(s.eigenvalues(0) == 0.0);
    CHECK(s.eigenvalues(1) == doctest::Approx(1.0));
    CHECK(s.eigenvalues(2) == doctest::Approx(1.0));
    CHECK(s.eigenvalues(3) == doctest::Approx(4.0));
    // Top eigenvector is proportional to [n-1, -1, ..., -1].
    Vector expect(4);
    expect << 3, -1, -1, -1;
    expect /= expect.norm();
    CHECK((s.vectors.col(3) - expect).cwiseAbs().maxCoeff() < 1e-12);

    for (int i = 0; i < 4; ++i) CHECK(s.vectors(i, 0) == 0.5);
}

TEST_CASE("whitened spectrum rejects asymmetric input") {
    Matrix L(2, 2);
    L << 1, -1, -0.5, 0.5;
    CHECK_THROWS_AS(whitened_spectrum(L, Vector::Ones(2)), ShapeError);
}

TEST_CASE("property: laplacian, incidence and spectrum identities on random graphs") {
    testgen::Rng rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = testgen::uniform_int(rng, 2, 30);
        const WeightedGraph g = testgen::connected_graph(rng, n);
        const Matrix L = laplacian(g);
        const Matrix C = incidence(g);
        Vector w(static_cast<Eigen::Index>(g.edge_count()));
        for (std::size_t k = 0; k < g.edge_count(); ++k) w(static_cast<Eigen::Index>(k)) = g.edge(k).weight;

        CHECK((L * Vector::Ones(L.rows())).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((C.colwise().sum()).cwiseAbs().maxCoeff() == 0.0);
        CHECK((C * w.asDiagonal() * C.transpose() - L).cwiseAbs().maxCoeff() < 1e-12);

        const Vector s = testgen::random_vector(rng, n, 0.2, 3.0);
        const SpectralDecomposition sp = whitened_spectrum(L, s);
        const Matrix& U = sp.vectors;
        CHECK(sp.eigenvalues.minCoeff() >= -1e-10);
        CHECK((U.transpose() * U - Matrix::Identity(U.rows(), U.cols())).cwiseAbs().maxCoeff() < 1e-10);
        const Vector is = s.array().rsqrt();
        const Matrix W = is.asDiagonal() * L * is.asDiagonal();
        CHECK((W - U * sp.eigenvalues.asDiagonal() * U.transpose()).norm() <= 1e-9 * L.norm());
        CHECK(std::abs(sp.eigenvalues(0)) < 1e-10);

        const SpectralDecomposition uni = whitened_spectrum(L, Vector::Constant(static_cast<Eigen::Index>(n), 0.7));
        CHECK((uni.vectors.col(0).array() == 1.0 / std::sqrt(static_cast<double>(n))).all());
        CHECK((C.transpose() * uni.vectors.col(0)).cwiseAbs().maxCoeff() < 1e-12);

        // Sign convention: first non-negligible component of every eigenvector is positive.
        for (Eigen::Index j = 0; j < U.cols(); ++j) {
            Eigen::Index i = 0;
            while (std::abs(U(i, j)) <= 1e-12) ++i;
            CHECK(U(i, j) > 0.0);
        }
    }
}
