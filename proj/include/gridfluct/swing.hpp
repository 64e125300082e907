#pragma once

#include <string>
#include <vector>

#include "gridfluct/graph.hpp"
#include "gridfluct/linalg.hpp"

namespace gridfluct {

/// Swing-equation network. Line weights of the topology are the capacities K_ij.
class PowerNetwork {
public:
    /// Validates every field and connectivity. Node ids default to "1".."n".
    PowerNetwork(WeightedGraph topology, Vector inertia, Vector damping, Vector power, Vector noise,
                 std::vector<std::string> node_ids = {});

    const WeightedGraph& topology() const { return topology_; }
    const Vector& inertia() const { return inertia_; }
    const Vector& damping() const { return damping_; }
    const Vector& power() const { return power_; }
    const Vector& noise() const { return noise_; }
    const std::vector<std::string>& node_ids() const { return ids_; }
    std::size_t node_count() const { return topology_.node_count(); }
    std::size_t line_count() const { return topology_.edge_count(); }

private:
    WeightedGraph topology_;
    Vector inertia_, damping_, power_, noise_;
    std::vector<std::string> ids_;
};

struct SynchronousState {
    Vector angles;  // radians, node 0 pinned to 0
    double sync_frequency = 0.0;
    double residual_norm = 0.0;
    int iterations = 0;
};

struct SecurityReport {
    bool secure = true;
    Vector margins;  // pi/2 - |angle difference| per line
};

/// Coefficients of the linear stochastic swing system around a synchronous state.
struct LinearizedSystem {
    WeightedGraph graph;  // weights K_ij cos(delta*_ij)
    Matrix laplacian;
    Matrix incidence;
    Vector inertia;
    Vector damping;
    Vector noise;

    std::size_t node_count() const { return graph.node_count(); }
    std::size_t line_count() const { return graph.edge_count(); }
};

/// Builds and validates a linearized system directly from its ingredients.
LinearizedSystem make_linearized_system(const WeightedGraph& weighted, const Vector& inertia,
                                        const Vector& damping, const Vector& noise);

double synchronized_frequency(const PowerNetwork& net);
SynchronousState solve_synchronous_state(const PowerNetwork& net);

/// Per-node power balance mismatch of the synchronous-state equations.
Vector flow_residual(const PowerNetwork& net, const Vector& angles, double sync_frequency);

SecurityReport security_check(const SynchronousState& state, const PowerNetwork& net);
LinearizedSystem linearize(const PowerNetwork& net, const SynchronousState& state);

struct SmibVariance {
    double q_delta = 0.0;
    double q_omega = 0.0;
};

/// Single machine against an infinite bus.
SmibVariance smib_variance(double inertia, double damping, double capacity, double power, double noise);

}  // namespace gridfluct
