#pragma once

#include <cstddef>
#include <cstdint>

#include "gridfluct/linalg.hpp"
#include "gridfluct/swing.hpp"
#include "gridfluct/variance.hpp"

namespace gridfluct {

/// Zero for dt or burn_in selects the automatic value.
struct SimConfig {
    double dt = 0.0;
    double burn_in = 0.0;
    double horizon = 100.0;
    std::size_t trajectories = 100;
    std::uint64_t master_seed = 1;
    std::size_t sample_stride = 1;
    // Each step of size dt is split into this many sub-steps whose noise increments sum to
    // the single-step increment, so runs with 1 and 2 sub-steps are pathwise coupled.
    std::size_t substeps = 1;
};

/// 0.01 / (sqrt(lambda_max) + alpha_max) with lambda_max the largest eigenvalue of
/// M^{-1/2} L M^{-1/2} and alpha_max the largest damping-to-inertia ratio.
double default_time_step(const LinearizedSystem& lin);

/// Slowest decay rate of the reduced system, -max Re eig(A2).
double slowest_decay_rate(const LinearizedSystem& lin);

/// Stream seed for one trajectory; distinct indices give distinct seeds for a fixed master.
std::uint64_t trajectory_seed(std::uint64_t master_seed, std::uint64_t trajectory_index);

struct SimulationResult {
    CovarianceReport report;  // pooled estimate with standard errors
    Matrix first_half;        // output covariance over the first half of the sampling window
    Matrix second_half;
    Matrix first_half_stderr;
    Matrix second_half_stderr;
    Vector mean;              // output mean and its standard error
    Vector mean_stderr;
    double dt = 0.0;
    double burn_in = 0.0;
};

/// Integrates the linear stochastic swing system with a semi-implicit Euler-Maruyama scheme
/// and estimates the stationary covariance of (line angle differences, frequencies).
SimulationResult simulate(const LinearizedSystem& lin, const SimConfig& cfg, std::size_t threads = 0);

CovarianceReport simulate_covariance(const LinearizedSystem& lin, const SimConfig& cfg, std::size_t threads = 0);

}  // namespace gridfluct
