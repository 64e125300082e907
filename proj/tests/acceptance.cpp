// Acceptance checks. Prints one PASS/FAIL line per criterion and exits nonzero on failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "gridfluct/closed_form_expressions.hpp"
#include "gridfluct/closed_forms.hpp"
#include "gridfluct/lyapunov.hpp"
#include "gridfluct/monte_carlo.hpp"
#include "gridfluct/swing.hpp"
#include "gridfluct/variance.hpp"
#include "support/generators.hpp"

using namespace gridfluct;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double rel(double a, double ref) { return std::abs(a - ref) / std::abs(ref); }

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

HomogeneousParams params(std::size_t n, double gamma, double eta, double d, Vector noise) {
    HomogeneousParams p;
    p.n = n;
    p.gamma = gamma;
    p.eta = eta;
    p.damping = d;
    p.noise = std::move(noise);
    return p;
}

Vector single(std::size_t n, std::size_t i, double b) {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(n));
    v(static_cast<Eigen::Index>(i)) = b;
    return v;
}

Outcome route_equivalence_complete() {
    const auto t0 = Clock::now();
    const HomogeneousParams p = params(20, 10.0, 0.5, 0.3, single(20, 1, 0.04));
    const LinearizedSystem lin = homogeneous_system(GraphKind::complete, p);
    const double closed = complete_single_source(p, 1).q_at_source;
    const CovarianceReport uni = asymptotic_variance_uniform_ratio(lin);
    const CovarianceReport num = asymptotic_variance_numeric(lin);
    const CovarianceReport full = complete_report(p);
    const double elapsed = seconds_since(t0);
    const double e1 = rel(closed, num.q_omega(1, 1));
    const double e2 = rel(uni.q_omega(1, 1), num.q_omega(1, 1));
    const double e3 = rel(closed, uni.q_omega(1, 1));
    const double blocks = std::max(report_discrepancy(uni, num), report_discrepancy(full, num));
    const double worst = std::max({e1, e2, e3, blocks});
    return {worst <= 1e-8 && elapsed < 1.0,
            fmt("max pairwise relative difference %.2e (full blocks %.2e), %.3f s", worst, blocks, elapsed)};
}

Outcome route_equivalence_star() {
    const auto t0 = Clock::now();
    const double b = std::sqrt(0.5);
    const HomogeneousParams leaf = params(20, 10.0, 0.5, 0.2, single(20, 1, b));
    const LinearizedSystem lin = homogeneous_system(GraphKind::star, leaf);
    const CovarianceReport num = asymptotic_variance_numeric(lin);
    const StarLeafSummary s = star_single_source_leaf(leaf);
    double worst = 0.0;
    worst = std::max(worst, rel(s.q_root, num.q_omega(0, 0)));
    worst = std::max(worst, rel(s.q_source, num.q_omega(1, 1)));
    for (Eigen::Index i = 2; i < 20; ++i) worst = std::max(worst, rel(s.q_other_nodes, num.q_omega(i, i)));
    worst = std::max(worst, rel(s.q_source_line, num.q_delta(0, 0)));
    for (Eigen::Index k = 1; k < 19; ++k) worst = std::max(worst, rel(s.q_other_lines, num.q_delta(k, k)));
    worst = std::max(worst, report_discrepancy(star_report(leaf), num));

    // Full matrices with every node disturbed, and with the root disturbed.
    testgen::Rng rng(2);
    const HomogeneousParams many = params(20, 10.0, 0.5, 0.2, testgen::random_vector(rng, 20, 0.1, 1.0));
    const CovarianceReport many_num = asymptotic_variance_numeric(homogeneous_system(GraphKind::star, many));
    worst = std::max(worst, report_discrepancy(star_report(many), many_num));
    const HomogeneousParams root = params(20, 10.0, 0.5, 0.2, single(20, 0, b));
    const CovarianceReport root_num = asymptotic_variance_numeric(homogeneous_system(GraphKind::star, root));
    const SingleSourceSummary r = star_single_source_root(root);
    worst = std::max(worst, rel(r.q_at_source, root_num.q_omega(0, 0)));
    worst = std::max(worst, rel(r.q_elsewhere, root_num.q_omega(5, 5)));
    worst = std::max(worst, rel(r.q_incident_lines, root_num.q_delta(3, 3)));
    const double elapsed = seconds_since(t0);
    return {worst <= 1e-8 && elapsed < 1.0, fmt("max relative difference %.2e, %.3f s", worst, elapsed)};
}

Outcome trace_law() {
    testgen::Rng rng(303);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = testgen::uniform_int(rng, 2, 15);
        const double eta = testgen::log_uniform(rng, 0.05, 5.0), d = testgen::log_uniform(rng, 0.05, 5.0);
        const WeightedGraph g = testgen::connected_graph(rng, n);
        const Vector b = testgen::random_vector(rng, n, 0.0, 1.0);
        const auto N = static_cast<Eigen::Index>(n);
        const LinearizedSystem lin = make_linearized_system(g, Vector::Constant(N, eta), Vector::Constant(N, d), b);
        const double expect = b.squaredNorm() / (2 * d * eta);
        worst = std::max(worst, rel(asymptotic_variance_numeric(lin).q_omega.trace(), expect));
    }
    return {worst <= 1e-9, fmt("50 graphs, max relative difference %.2e", worst)};
}

Outcome superposition() {
    testgen::Rng rng(404);
    double worst_scaled = 0.0, worst_entry = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = testgen::uniform_int(rng, 3, 15);
        const LinearizedSystem lin = testgen::uniform_ratio_system(rng, n, testgen::log_uniform(rng, 0.1, 10.0));
        const CovarianceReport all = asymptotic_variance_uniform_ratio(lin);
        Matrix sum[3] = {Matrix::Zero(all.q_delta.rows(), all.q_delta.cols()),
                         Matrix::Zero(all.q_omega.rows(), all.q_omega.cols()),
                         Matrix::Zero(all.q_delta_omega.rows(), all.q_delta_omega.cols())};
        for (std::size_t i = 0; i < n; ++i) {
            LinearizedSystem one = lin;
            one.noise = single(n, i, lin.noise(static_cast<Eigen::Index>(i)));
            const CovarianceReport r = asymptotic_variance_uniform_ratio(one);
            sum[0] += r.q_delta;
            sum[1] += r.q_omega;
            sum[2] += r.q_delta_omega;
        }
        const Matrix* ref[3] = {&all.q_delta, &all.q_omega, &all.q_delta_omega};
        for (int k = 0; k < 3; ++k) {
            worst_scaled = std::max(worst_scaled, relative_discrepancy(sum[k], *ref[k]));
            worst_entry = std::max(
                worst_entry, ((sum[k] - *ref[k]).array().abs() / ref[k]->array().abs().max(1e-300)).maxCoeff());
        }
    }
    return {worst_scaled <= 1e-10 && worst_entry <= 1e-10,
            fmt("20 graphs, max entry difference / block scale %.2e (per-entry relative %.2e)", worst_scaled,
                worst_entry)};
}

Outcome first_order_consistency() {
    testgen::Rng rng(505);
    const HomogeneousParams c = params(20, 10.0, 0.5, 0.3, testgen::random_vector(rng, 20, 0.0, 0.1));
    const Matrix second = asymptotic_variance_numeric(homogeneous_system(GraphKind::complete, c)).q_delta;
    const double complete_gap = relative_discrepancy(second, complete_first_order(c));

    const HomogeneousParams s = params(8, 1.0, 1e-6, 1.0, testgen::random_vector(rng, 8, 0.1, 1.0));
    const Matrix fo = star_first_order(s);
    const Matrix low = star_report(s).q_delta;
    const double star_gap = (low - fo).cwiseAbs().maxCoeff() / fo.cwiseAbs().maxCoeff();
    return {complete_gap <= 1e-12 && star_gap <= 1e-6,
            fmt("complete n=20 gap %.2e; star n=8 (gamma=1, d=1, eta=1e-6) gap %.2e", complete_gap, star_gap)};
}

Outcome trend_signs() {
    testgen::Rng rng(606);
    std::size_t checked = 0, failed = 0;
    std::string first_failure;
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = testgen::uniform_int(rng, 3, 100);
        const double g = testgen::log_uniform(rng, 0.1, 100), eta = testgen::log_uniform(rng, 0.05, 5),
                     d = testgen::log_uniform(rng, 0.05, 5), b = testgen::uniform(rng, 0.1, 1.0);
        const TrendReport reports[3] = {
            trend_report(GraphKind::complete, params(n, g, eta, d, single(n, n / 2, b)), n / 2),
            trend_report(GraphKind::star, params(n, g, eta, d, single(n, 0, b)), 0),
            trend_report(GraphKind::star, params(n, g, eta, d, single(n, 1, b)), 1)};
        for (const TrendReport& r : reports) {
            for (const TrendEntry& e : r.derivatives) {
                ++checked;
                if (!(e.sign_ok && e.fd_ok)) {
                    ++failed;
                    if (first_failure.empty())
                        first_failure = " first failure: d" + e.quantity + "/d" + e.variable +
                                        fmt(" at n=%g gamma=%g eta=%g d=%g", double(n), g, eta, d);
                }
            }
            for (const TrendLimit& l : r.limits) {
                ++checked;
                if (!l.ok) ++failed;
            }
        }
    }
    // The critical size separates decreasing from increasing source variance.
    std::size_t sign_failures = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const double g = testgen::log_uniform(rng, 0.1, 100), eta = testgen::log_uniform(rng, 0.05, 5),
                     d = testgen::log_uniform(rng, 0.05, 5);
        const double nc = static_cast<double>(critical_size(d, g, eta));
        auto slope = [&](double n) {
            const double h = 1e-6 * n;
            return (formulas::complete_freq_source(n + h, g, eta, d, 1.0) -
                    formulas::complete_freq_source(n - h, g, eta, d, 1.0)) /
                   (2 * h);
        };
        const double scale = formulas::complete_freq_source(nc, g, eta, d, 1.0) / nc;
        if (!(slope(nc) <= 1e-7 * scale && slope(nc + 1) > 0.0)) ++sign_failures;
    }
    return {failed == 0 && sign_failures == 0,
            fmt("%.0f derivative and limit checks, %.0f failed; critical size sign change failed on %.0f of 100",
                double(checked), double(failed), double(sign_failures)) +
                first_failure};
}

Outcome monte_carlo_agreement() {
    const auto t0 = Clock::now();
    const Vector b = (Vector(5) << 0.02, 0.04, 0.03, 0.05, 0.01).finished();
    const LinearizedSystem lin = homogeneous_system(GraphKind::complete, params(5, 10.0, 0.5, 0.3, b));
    SimConfig cfg;
    cfg.dt = 1e-3;
    cfg.burn_in = 40.0;
    cfg.horizon = 25.0;
    cfg.sample_stride = 10;
    cfg.trajectories = 2000;
    cfg.master_seed = 20240611;
    const CovarianceReport mc = simulate_covariance(lin, cfg);
    const CovarianceReport ref = asymptotic_variance_numeric(lin);
    const double elapsed = seconds_since(t0);
    int entries = 0, outside = 0;
    double worst = 0.0;
    auto scan = [&](const Matrix& est, const Matrix& se, const Matrix& exact, bool symmetric) {
        for (Eigen::Index i = 0; i < est.rows(); ++i)
            for (Eigen::Index j = symmetric ? i : 0; j < est.cols(); ++j) {
                const double z = std::abs(est(i, j) - exact(i, j)) / se(i, j);
                worst = std::max(worst, z);
                ++entries;
                if (!(z <= 4.0)) ++outside;
            }
    };
    scan(mc.q_delta, mc.stderr_delta, ref.q_delta, true);
    scan(mc.q_omega, mc.stderr_omega, ref.q_omega, true);
    scan(mc.q_delta_omega, mc.stderr_delta_omega, ref.q_delta_omega, false);
    return {outside == 0 && elapsed < 60.0,
            fmt("%.0f entries, %.0f outside 4 SE, largest |z| %.2f, %.1f s", entries, outside, worst, elapsed)};
}

Outcome oracle_independence() {
    testgen::Rng rng(808);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = testgen::uniform_int(rng, 1, 40);
        const Matrix A = testgen::hurwitz_matrix(rng, n);
        const Matrix W = testgen::random_psd(rng, n, testgen::uniform_int(rng, 1, n));
        worst = std::max(worst, testgen::rel_max(lyapunov_solve(A, W).solution, lyapunov_solve_kronecker(A, W).solution));
    }
    return {worst <= 1e-10, fmt("100 systems, max relative difference %.2e", worst)};
}

Outcome smib() {
    double worst = 0.0;
    const double K = 2.0, P = 0.7, beta = 0.3;
    const double w = std::sqrt(K * K - P * P);
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) {
            const double d = 0.05 * std::pow(100.0, i / 9.0), eta = 0.05 * std::pow(100.0, j / 9.0);
            const SmibVariance v = smib_variance(eta, d, K, P, beta);
            Matrix A(2, 2), B(2, 1);
            A << 0, 1, -w / eta, -d / eta;
            B << 0, beta / eta;
            const Matrix Q = lyapunov_solve(A, B * B.transpose()).solution;
            worst = std::max({worst, rel(v.q_delta, Q(0, 0)), rel(v.q_omega, Q(1, 1))});
        }
    return {worst <= 1e-12, fmt("10x10 grid, max relative difference %.2e", worst)};
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"route equivalence, complete graph n=20", route_equivalence_complete},
        {"route equivalence, star graph n=20", route_equivalence_star},
        {"frequency trace law", trace_law},
        {"superposition over sources", superposition},
        {"first-order consistency", first_order_consistency},
        {"trend signs and critical size", trend_signs},
        {"Monte Carlo agreement", monte_carlo_agreement},
        {"Lyapunov backend independence", oracle_independence},
        {"single machine against infinite bus", smib},
    };
    int failures = 0;
    int k = 0;
    for (const auto& [name, check] : criteria) {
        ++k;
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::printf("[%s] criterion %d: %s: %s\n", o.pass ? "PASS" : "FAIL", k, name, o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
