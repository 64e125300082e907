#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gridfluct/errors.hpp"
#include "gridfluct/lyapunov.hpp"
#include "gridfluct/swing.hpp"
#include "support/generators.hpp"

using namespace gridfluct;

namespace {

PowerNetwork two_node(double p, double K, double d1 = 1.0, double d2 = 1.0) {
    Vector power(2), damping(2);
    power << p, -p;
    damping << d1, d2;
    return PowerNetwork(WeightedGraph(2, {{0, 1, K}}), Vector::Ones(2), damping, power, Vector::Zero(2));
}

PowerNetwork uniform_network(const WeightedGraph& g, const Vector& power, double d = 1.0) {
    const auto n = static_cast<Eigen::Index>(g.node_count());
    return PowerNetwork(g, Vector::Ones(n), Vector::Constant(n, d), power, Vector::Zero(n));
}

}  // namespace

TEST_CASE("synchronized frequency") {
    Vector p(3);
    p << 1, 0, 0;
    CHECK(synchronized_frequency(uniform_network(canonical_complete(3, 1.0), p)) == doctest::Approx(1.0 / 3.0));
    p << 1, -0.5, -0.5;
    CHECK(synchronized_frequency(uniform_network(canonical_complete(3, 1.0), p)) == 0.0);
    Vector p2(2), d2(2);
    p2 << 2, -1;
    d2 << 1, 3;
    PowerNetwork net(WeightedGraph(2, {{0, 1, 1.0}}), Vector::Ones(2), d2, p2, Vector::Zero(2));
    CHECK(synchronized_frequency(net) == doctest::Approx(0.25));
}

TEST_CASE("synchronous state examples") {
    const SynchronousState zero = solve_synchronous_state(uniform_network(canonical_star(5, 2.0), Vector::Zero(5)));
    CHECK(zero.angles.cwiseAbs().maxCoeff() == 0.0);
    CHECK(zero.sync_frequency == 0.0);

    const double p = 0.7, K = 1.3;
    const SynchronousState two = solve_synchronous_state(two_node(p, K));
    CHECK(two.angles(0) == 0.0);
    CHECK(two.angles(0) - two.angles(1) == doctest::Approx(std::asin(p / K)).epsilon(1e-12));
    CHECK(two.sync_frequency == 0.0);

    Vector pw(4);
    pw << 0.6, -0.2, -0.2, -0.2;
    const PowerNetwork net = uniform_network(canonical_complete(4, 2.0), pw);
    const SynchronousState st = solve_synchronous_state(net);
    CHECK(st.residual_norm <= 1e-10);
    // Substitute back into the balance equations independently of the solver.
    for (Eigen::Index i = 0; i < 4; ++i) {
        double r = pw(i) - st.sync_frequency;
        for (Eigen::Index j = 0; j < 4; ++j)
            if (j != i) r += 2.0 * std::sin(st.angles(j) - st.angles(i));
        CHECK(std::abs(r) <= 1e-10);
    }
}

TEST_CASE("no synchronous state when the line cannot carry the power") {
    CHECK_THROWS_AS(solve_synchronous_state(two_node(1.5, 1.0)), NoSynchronousStateError);
}

TEST_CASE("security check") {
    const PowerNetwork flat = two_node(0.0, 1.0);
    const SecurityReport s0 = security_check(solve_synchronous_state(flat), flat);
    CHECK(s0.secure);
    CHECK(s0.margins(0) == doctest::Approx(std::numbers::pi / 2));

    const PowerNetwork tight = two_node(0.999, 1.0);
    const SecurityReport s1 = security_check(solve_synchronous_state(tight), tight);
    CHECK(s1.secure);
    CHECK(s1.margins(0) == doctest::Approx(std::numbers::pi / 2 - std::asin(0.999)).epsilon(1e-9));

    SynchronousState edge;
    edge.angles = Vector::Zero(2);
    edge.angles(1) = -std::numbers::pi / 2;
    const SecurityReport s2 = security_check(edge, flat);
    CHECK_FALSE(s2.secure);
    CHECK_THROWS_AS(linearize(flat, edge), InsecureStateError);
}

TEST_CASE("linearization weights") {
    const PowerNetwork net = uniform_network(canonical_complete(5, 10.0), Vector::Zero(5));
    const LinearizedSystem lin = linearize(net, solve_synchronous_state(net));
    CHECK(lin.laplacian == laplacian(canonical_complete(5, 10.0)));

    const PowerNetwork two = two_node(0.0, 2.0);
    SynchronousState st;
    st.angles = Vector::Zero(2);
    st.angles(1) = -std::numbers::pi / 3;
    const LinearizedSystem l2 = linearize(two, st);
    CHECK(l2.graph.edge(0).weight == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("network validation names the field") {
    auto g = canonical_complete(3, 1.0);
    Vector bad = Vector::Ones(3);
    bad(1) = -1.0;
    try {
        PowerNetwork(g, bad, Vector::Ones(3), Vector::Zero(3), Vector::Zero(3));
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("inertia[2]") != std::string::npos);
    }
    CHECK_THROWS_AS(PowerNetwork(WeightedGraph(4, {{0, 1, 1.0}, {2, 3, 1.0}}), Vector::Ones(4), Vector::Ones(4),
                                 Vector::Zero(4), Vector::Zero(4)),
                    ConnectivityError);
}

TEST_CASE("single machine against an infinite bus") {
    const SmibVariance v = smib_variance(1.0, 2.0, 2.0, 0.0, 1.0);
    CHECK(v.q_delta == doctest::Approx(0.125).epsilon(1e-14));
    CHECK(v.q_omega == doctest::Approx(0.25).epsilon(1e-14));
    const SmibVariance z = smib_variance(1.0, 2.0, 2.0, 0.0, 0.0);
    CHECK(z.q_delta == 0.0);
    CHECK(z.q_omega == 0.0);
    const SmibVariance near = smib_variance(1.0, 2.0, 2.0, 2.0 - 1e-9, 1.0);
    CHECK(near.q_delta > 1e3);
    CHECK(near.q_omega == doctest::Approx(0.25));
    CHECK_THROWS_AS(smib_variance(1.0, 2.0, 2.0, 2.0, 1.0), NoEquilibriumError);
}

TEST_CASE("property: single machine closed form equals the 2x2 Lyapunov solve") {
    const double K = 2.0, P = 0.5, beta = 1.0;
    const double l = std::sqrt(K * K - P * P);
    for (int a = 0; a < 10; ++a)
        for (int b = 0; b < 10; ++b) {
            const double d = 0.1 * std::pow(50.0, a / 9.0);
            const double eta = 0.1 * std::pow(50.0, b / 9.0);
            Matrix A(2, 2), B(2, 1);
            A << 0, 1, -l / eta, -d / eta;
            B << 0, beta / eta;
            const Matrix Q = lyapunov_solve_kronecker(A, B * B.transpose()).solution;
            const SmibVariance v = smib_variance(eta, d, K, P, beta);
            CHECK(std::abs(v.q_delta - Q(0, 0)) <= 1e-12 * Q(0, 0));
            CHECK(std::abs(v.q_omega - Q(1, 1)) <= 1e-12 * Q(1, 1));
            CHECK(std::abs(Q(0, 1)) <= 1e-12 * Q(0, 0));
        }
}

TEST_CASE("property: residual bound and gauge invariance on random networks") {
    testgen::Rng rng(5);
    int solved = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = testgen::uniform_int(rng, 2, 12);
        const WeightedGraph g = testgen::connected_graph(rng, n, 0.4, 1.0, 4.0);
        Vector power = testgen::random_vector(rng, n, -0.5, 0.5);
        const Vector damping = testgen::random_vector(rng, n, 0.5, 2.0);
        const PowerNetwork net(g, Vector::Ones(static_cast<Eigen::Index>(n)), damping, power,
                               Vector::Zero(static_cast<Eigen::Index>(n)));
        SynchronousState st;
        try {
            st = solve_synchronous_state(net);
        } catch (const NoSynchronousStateError&) {
            continue;
        }
        ++solved;
        CHECK(st.residual_norm <= 1e-10);
        CHECK(flow_residual(net, st.angles, st.sync_frequency).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK(std::abs(st.sync_frequency - power.sum() / damping.sum()) <= 1e-12);

        // A uniform shift of the injections is absorbed by the common frequency when the
        // damping is identical; with unequal damping the shift redistributes flows.
        const Vector flat_d = Vector::Constant(static_cast<Eigen::Index>(n), damping(0));
        const PowerNetwork base(g, net.inertia(), flat_d, power, net.noise());
        const SynchronousState s1 = solve_synchronous_state(base);
        const double c = testgen::uniform(rng, -2.0, 2.0);
        const PowerNetwork shifted(g, net.inertia(), flat_d, (power.array() + c).matrix(), net.noise());
        const SynchronousState s2 = solve_synchronous_state(shifted);
        CHECK(s2.sync_frequency - s1.sync_frequency ==
              doctest::Approx(static_cast<double>(n) * c / flat_d.sum()).epsilon(1e-10));
        CHECK((s2.angles - s1.angles).cwiseAbs().maxCoeff() <= 1e-8);
    }
    CHECK(solved > 40);
}
