#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "gridfluct/linalg.hpp"

namespace gridfluct {

/// Undirected line with a stored orientation from -> to (0-based node indices).
struct Edge {
    std::size_t from = 0;
    std::size_t to = 0;
    double weight = 1.0;
};

class WeightedGraph {
public:
    /// Throws InvalidSizeError for n == 0 and InvalidGraphError for bad edges
    /// (self loops, out-of-range endpoints, duplicate pairs, non-positive weights).
    WeightedGraph(std::size_t node_count, std::vector<Edge> edges);

    std::size_t node_count() const { return n_; }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }
    const Edge& edge(std::size_t k) const { return edges_.at(k); }

    /// Index of the line joining a and b in either orientation.
    std::optional<std::size_t> find_edge(std::size_t a, std::size_t b) const;

    /// Same topology and orientation with new per-line weights.
    WeightedGraph with_weights(const std::vector<double>& weights) const;

private:
    std::size_t n_;
    std::vector<Edge> edges_;
};

Matrix laplacian(const WeightedGraph& g);
Matrix incidence(const WeightedGraph& g);

/// Complete graph with lexicographic line order (1,2),(1,3),...,(n-1,n).
WeightedGraph canonical_complete(std::size_t n, double weight);
/// Star graph rooted at node 0 with line k joining the root to node k+1.
WeightedGraph canonical_star(std::size_t n, double weight);

bool is_connected(const WeightedGraph& g);
double algebraic_connectivity(const WeightedGraph& g);

struct SpectralDecomposition {
    Vector eigenvalues;  // ascending
    Matrix vectors;      // orthonormal columns
    std::vector<std::vector<std::size_t>> degeneracy_groups;
};

/// Eigen-decomposition of S^{-1/2} L S^{-1/2} for a diagonal S given by its entries.
SpectralDecomposition whitened_spectrum(const Matrix& L, const Vector& s_diag);

/// Clusters of an ascending spectrum whose neighbouring gaps are below rel_gap * scale.
std::vector<std::vector<std::size_t>> cluster_eigenvalues(const Vector& ascending, double rel_gap = 1e-9);

}  // namespace gridfluct
