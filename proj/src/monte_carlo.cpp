#include "gridfluct/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/random/normal_distribution.hpp>
#include <sstream>
#include <vector>

#include "gridfluct/errors.hpp"
#include "gridfluct/lyapunov.hpp"
#include "gridfluct/parallel.hpp"

namespace gridfluct {

namespace {

constexpr double kDivergence = 1e12;
constexpr std::size_t kResyncInterval = 10000;
constexpr std::uint64_t kBridgeStream = 0x6a09e667f3bcc909ULL;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Raw moments of one trajectory, split into the two halves of the sampling window.
struct TrajectoryMoments {
    Vector sum[2];
    Matrix outer[2];
    std::size_t count[2] = {0, 0};
};

struct Problem {
    const LinearizedSystem* lin;
    std::size_t n, m, p;
    Vector minv, ratio, kick;  // 1/m_i, d_i/m_i, b_i/m_i
    double dt;
    std::size_t substeps;
    std::size_t burn_steps;
    std::size_t sample_steps;
    std::size_t stride;
    std::uint64_t seed;
};

void check_state(const Vector& delta, const Vector& omega, std::size_t step, double dt) {
    const double a = delta.cwiseAbs().maxCoeff();
    const double b = omega.cwiseAbs().maxCoeff();
    if (!(a < kDivergence) || !(b < kDivergence)) {
        std::ostringstream msg;
        msg << "integration diverged at step " << step << " with dt = " << dt << "; use a smaller time step";
        throw StepSizeError(msg.str());
    }
}

TrajectoryMoments run_trajectory(const Problem& pr, std::size_t index) {
    const LinearizedSystem& lin = *pr.lin;
    const auto n = static_cast<Eigen::Index>(pr.n);
    const auto p = static_cast<Eigen::Index>(pr.p);
    std::mt19937_64 main_rng(trajectory_seed(pr.seed, index));
    std::mt19937_64 bridge_rng(trajectory_seed(pr.seed ^ kBridgeStream, index));
    boost::random::normal_distribution<double> normal(0.0, 1.0);
    boost::random::normal_distribution<double> bridge_normal(0.0, 1.0);

    const double h = pr.dt / static_cast<double>(pr.substeps);
    const double sqrt_dt = std::sqrt(pr.dt);
    const double sqrt_h = std::sqrt(h);

    Vector delta = Vector::Zero(n), omega = Vector::Zero(n);
    Vector force(n), xi(n), zeta(n), dw(n), out(p);

    TrajectoryMoments mom;
    for (int half = 0; half < 2; ++half) {
        mom.sum[half] = Vector::Zero(p);
        mom.outer[half] = Matrix::Zero(p, p);
    }
    const std::size_t total = pr.burn_steps + pr.sample_steps;
    const std::size_t samples = pr.sample_steps / pr.stride;

    auto substep = [&](const Vector& increment) {
        force.noalias() = lin.laplacian * delta;
        omega.array() += -h * (pr.minv.array() * force.array() + pr.ratio.array() * omega.array()) +
                         pr.kick.array() * increment.array();
        delta.noalias() += h * omega;
    };

    std::size_t sampled = 0;
    for (std::size_t step = 0; step < total; ++step) {
        for (Eigen::Index i = 0; i < n; ++i) xi(i) = normal(main_rng);
        if (pr.substeps == 1) {
            dw = sqrt_dt * xi;
            substep(dw);
        } else {
            for (Eigen::Index i = 0; i < n; ++i) zeta(i) = bridge_normal(bridge_rng);
            const double s = sqrt_h / std::sqrt(2.0);
            dw = s * (xi + zeta);
            substep(dw);
            dw = s * (xi - zeta);
            substep(dw);
        }
        if ((step + 1) % 256 == 0) check_state(delta, omega, step + 1, pr.dt);
        if ((step + 1) % kResyncInterval == 0) delta.array() -= delta.mean();

        if (step < pr.burn_steps) continue;
        const std::size_t k = step - pr.burn_steps + 1;
        if (k % pr.stride != 0) continue;
        // Angles are read half a step back, which is where the scheme's angle and
        // frequency samples are consistent to second order.
        for (std::size_t e = 0; e < pr.m; ++e) {
            const Edge& ed = lin.graph.edge(e);
            out(static_cast<Eigen::Index>(e)) =
                (delta(ed.from) - 0.5 * h * omega(ed.from)) - (delta(ed.to) - 0.5 * h * omega(ed.to));
        }
        out.tail(n) = omega;
        const int half = sampled < samples / 2 ? 0 : 1;
        mom.sum[half] += out;
        mom.outer[half].selfadjointView<Eigen::Lower>().rankUpdate(out);
        ++mom.count[half];
        ++sampled;
    }
    check_state(delta, omega, total, pr.dt);
    for (int half = 0; half < 2; ++half)
        mom.outer[half] = mom.outer[half].selfadjointView<Eigen::Lower>();
    return mom;
}

// Running sums over trajectories of per-trajectory averages and their squares.
struct Pool {
    Vector mean_sum, mean_sq;
    Matrix second_sum, second_sq;
    std::size_t trajectories = 0;

    explicit Pool(Eigen::Index p)
        : mean_sum(Vector::Zero(p)), mean_sq(Vector::Zero(p)), second_sum(Matrix::Zero(p, p)),
          second_sq(Matrix::Zero(p, p)) {}

    void add(const Vector& sum, const Matrix& outer, std::size_t count) {
        const double k = static_cast<double>(count);
        const Vector mu = sum / k;
        const Matrix sec = outer / k;
        mean_sum += mu;
        mean_sq.array() += mu.array().square();
        second_sum += sec;
        second_sq.array() += sec.array().square();
        ++trajectories;
    }

    // Covariance about the grand mean and the trajectory-level standard error.
    void finish(Matrix& cov, Matrix& se, Vector& mean, Vector& mean_se) const {
        const double t = static_cast<double>(trajectories);
        mean = mean_sum / t;
        const Matrix avg = second_sum / t;
        cov = avg - mean * mean.transpose();
        cov = 0.5 * (cov + cov.transpose());
        const Matrix var = ((second_sq / t).array() - avg.array().square()).max(0.0) * (t / (t - 1));
        se = (var / t).array().sqrt();
        const Vector mvar = ((mean_sq / t).array() - mean.array().square()).max(0.0) * (t / (t - 1));
        mean_se = (mvar / t).array().sqrt();
    }
};

}  // namespace

std::uint64_t trajectory_seed(std::uint64_t master_seed, std::uint64_t trajectory_index) {
    return splitmix64(splitmix64(master_seed) + 0x9e3779b97f4a7c15ULL * (trajectory_index + 1));
}

double default_time_step(const LinearizedSystem& lin) {
    const SpectralDecomposition sp = whitened_spectrum(lin.laplacian, lin.inertia);
    const double lam_max = std::max(0.0, sp.eigenvalues.maxCoeff());
    const double alpha_max = (lin.damping.array() / lin.inertia.array()).maxCoeff();
    return 0.01 / (std::sqrt(lam_max) + alpha_max);
}

double slowest_decay_rate(const LinearizedSystem& lin) {
    const ReducedSystem rs = reduce_system(lin);
    const double abscissa = spectral_abscissa(rs.a2);
    if (!(abscissa < -1e-12)) throw InstabilityError("reduced system is not Hurwitz");
    return -abscissa;
}

SimulationResult simulate(const LinearizedSystem& lin, const SimConfig& cfg, std::size_t threads) {
    if (!(cfg.dt >= 0.0) || !std::isfinite(cfg.dt)) throw ValidationError("mc.dt must be positive");
    const double alpha_min = slowest_decay_rate(lin);
    SimulationResult res;
    res.dt = cfg.dt > 0.0 ? cfg.dt : default_time_step(lin);
    const double min_burn = 10.0 / alpha_min;
    res.burn_in = cfg.burn_in > 0.0 ? cfg.burn_in : min_burn;

    if (res.burn_in < min_burn * (1 - 1e-12)) {
        std::ostringstream msg;
        msg << "mc.burn_in must be at least 10 / slowest decay rate = " << min_burn;
        throw ValidationError(msg.str());
    }
    if (!(cfg.horizon >= 100.0 * res.dt)) throw ValidationError("mc.horizon must be at least 100 * dt");
    if (cfg.trajectories < 2) throw ValidationError("mc.trajectories must be at least 2");
    if (cfg.sample_stride < 1) throw ValidationError("mc.sample_stride must be at least 1");
    if (cfg.substeps < 1 || cfg.substeps > 2) throw ValidationError("mc.substeps must be 1 or 2");

    Problem pr;
    pr.lin = &lin;
    pr.n = lin.node_count();
    pr.m = lin.line_count();
    pr.p = pr.n + pr.m;
    pr.minv = lin.inertia.cwiseInverse();
    pr.ratio = lin.damping.array() / lin.inertia.array();
    pr.kick = lin.noise.array() / lin.inertia.array();
    pr.dt = res.dt;
    pr.substeps = cfg.substeps;
    pr.burn_steps = static_cast<std::size_t>(std::ceil(res.burn_in / res.dt - 1e-9));
    pr.sample_steps = static_cast<std::size_t>(std::ceil(cfg.horizon / res.dt - 1e-9));
    pr.stride = cfg.sample_stride;
    pr.seed = cfg.master_seed;
    if (pr.sample_steps / pr.stride < 2) throw ValidationError("mc: fewer than two samples per trajectory");

    const auto p = static_cast<Eigen::Index>(pr.p);
    Pool whole(p), first(p), second(p);
    if (threads == 0) threads = thread_budget();
    const std::size_t block = std::max<std::size_t>(1, threads) * 4;
    std::vector<TrajectoryMoments> buffer;
    for (std::size_t start = 0; start < cfg.trajectories; start += block) {
        const std::size_t count = std::min(block, cfg.trajectories - start);
        buffer.assign(count, TrajectoryMoments{});
        parallel_for(count, threads, [&](std::size_t j) { buffer[j] = run_trajectory(pr, start + j); });
        // Reduction in trajectory order keeps the result independent of scheduling.
        for (const TrajectoryMoments& mom : buffer) {
            whole.add(mom.sum[0] + mom.sum[1], mom.outer[0] + mom.outer[1], mom.count[0] + mom.count[1]);
            first.add(mom.sum[0], mom.outer[0], mom.count[0]);
            second.add(mom.sum[1], mom.outer[1], mom.count[1]);
        }
    }

    Matrix cov, se;
    Vector tmp_mean, tmp_mean_se;
    whole.finish(cov, se, res.mean, res.mean_stderr);
    first.finish(res.first_half, res.first_half_stderr, tmp_mean, tmp_mean_se);
    second.finish(res.second_half, res.second_half_stderr, tmp_mean, tmp_mean_se);

    const auto m = static_cast<Eigen::Index>(pr.m);
    const auto n = static_cast<Eigen::Index>(pr.n);
    CovarianceReport& rep = res.report;
    rep.method = Method::monte_carlo;
    rep.q_delta = cov.topLeftCorner(m, m);
    rep.q_omega = cov.bottomRightCorner(n, n);
    rep.q_delta_omega = cov.bottomLeftCorner(n, m);
    rep.stderr_delta = se.topLeftCorner(m, m);
    rep.stderr_omega = se.bottomRightCorner(n, n);
    rep.stderr_delta_omega = se.bottomLeftCorner(n, m);
    rep.samples = static_cast<long long>(cfg.trajectories * (pr.sample_steps / pr.stride));
    return res;
}

CovarianceReport simulate_covariance(const LinearizedSystem& lin, const SimConfig& cfg, std::size_t threads) {
    return simulate(lin, cfg, threads).report;
}

}  // namespace gridfluct
