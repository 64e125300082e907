#include "gridfluct/graph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <string>
#include <utility>

#include "gridfluct/errors.hpp"

namespace gridfluct {

WeightedGraph::WeightedGraph(std::size_t node_count, std::vector<Edge> edges)
    : n_(node_count), edges_(std::move(edges)) {
    if (n_ == 0) throw InvalidSizeError("graph must have at least one node");
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t k = 0; k < edges_.size(); ++k) {
        const Edge& e = edges_[k];
        const std::string where = "line " + std::to_string(k + 1);
        if (e.from >= n_ || e.to >= n_) throw InvalidGraphError(where + ": endpoint out of range");
        if (e.from == e.to) throw InvalidGraphError(where + ": self loop");
        if (!(e.weight > 0.0) || !std::isfinite(e.weight))
            throw InvalidGraphError(where + ": weight must be positive and finite");
        auto key = std::minmax(e.from, e.to);
        if (!seen.insert(key).second) throw InvalidGraphError(where + ": duplicate line");
    }
}

std::optional<std::size_t> WeightedGraph::find_edge(std::size_t a, std::size_t b) const {
    for (std::size_t k = 0; k < edges_.size(); ++k) {
        const Edge& e = edges_[k];
        if ((e.from == a && e.to == b) || (e.from == b && e.to == a)) return k;
    }
    return std::nullopt;
}

WeightedGraph WeightedGraph::with_weights(const std::vector<double>& weights) const {
    if (weights.size() != edges_.size()) throw ShapeError("weight count does not match line count");
    std::vector<Edge> out = edges_;
    for (std::size_t k = 0; k < out.size(); ++k) out[k].weight = weights[k];
    return WeightedGraph(n_, std::move(out));
}

Matrix laplacian(const WeightedGraph& g) {
    const std::size_t n = g.node_count();
    Matrix L = Matrix::Zero(n, n);
    for (const Edge& e : g.edges()) {
        L(e.from, e.from) += e.weight;
        L(e.to, e.to) += e.weight;
        L(e.from, e.to) -= e.weight;
        L(e.to, e.from) -= e.weight;
    }
    return L;
}

Matrix incidence(const WeightedGraph& g) {
    Matrix C = Matrix::Zero(g.node_count(), g.edge_count());
    for (std::size_t k = 0; k < g.edge_count(); ++k) {
        C(g.edge(k).from, k) = 1.0;
        C(g.edge(k).to, k) = -1.0;
    }
    return C;
}

WeightedGraph canonical_complete(std::size_t n, double weight) {
    if (n < 2) throw InvalidSizeError("complete graph needs n >= 2");
    std::vector<Edge> edges;
    edges.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) edges.push_back({i, j, weight});
    return WeightedGraph(n, std::move(edges));
}

WeightedGraph canonical_star(std::size_t n, double weight) {
    if (n < 2) throw InvalidSizeError("star graph needs n >= 2");
    std::vector<Edge> edges;
    edges.reserve(n - 1);
    for (std::size_t j = 1; j < n; ++j) edges.push_back({0, j, weight});
    return WeightedGraph(n, std::move(edges));
}

namespace {

bool traversal_connected(const WeightedGraph& g) {
    const std::size_t n = g.node_count();
    std::vector<std::vector<std::size_t>> adj(n);
    for (const Edge& e : g.edges()) {
        adj[e.from].push_back(e.to);
        adj[e.to].push_back(e.from);
    }
    std::vector<bool> seen(n, false);
    std::queue<std::size_t> q;
    q.push(0);
    seen[0] = true;
    std::size_t count = 1;
    while (!q.empty()) {
        std::size_t v = q.front();
        q.pop();
        for (std::size_t w : adj[v])
            if (!seen[w]) {
                seen[w] = true;
                ++count;
                q.push(w);
            }
    }
    return count == n;
}

}  // namespace

double algebraic_connectivity(const WeightedGraph& g) {
    if (g.node_count() < 2) return 0.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(laplacian(g), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(1);
}

bool is_connected(const WeightedGraph& g) {
    const bool walk = traversal_connected(g);
    if (g.node_count() < 2 || walk) return walk;
    // A disconnected graph must have a second zero Laplacian eigenvalue.
    const double scale = std::max(1.0, laplacian(g).diagonal().maxCoeff());
    if (algebraic_connectivity(g) > 1e-9 * scale) throw NumericalError("connectivity checks disagree");
    return false;
}

std::vector<std::vector<std::size_t>> cluster_eigenvalues(const Vector& ev, double rel_gap) {
    std::vector<std::vector<std::size_t>> groups;
    if (ev.size() == 0) return groups;
    const double scale = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    groups.push_back({0});
    for (Eigen::Index i = 1; i < ev.size(); ++i) {
        if (ev(i) - ev(i - 1) <= rel_gap * scale)
            groups.back().push_back(static_cast<std::size_t>(i));
        else
            groups.push_back({static_cast<std::size_t>(i)});
    }
    return groups;
}

SpectralDecomposition whitened_spectrum(const Matrix& L, const Vector& s_diag) {
    const Eigen::Index n = L.rows();
    if (L.cols() != n || s_diag.size() != n) throw ShapeError("whitened_spectrum: dimension mismatch");
    const double norm = std::max(L.cwiseAbs().maxCoeff(), 1e-300);
    if ((L - L.transpose()).cwiseAbs().maxCoeff() > 1e-9 * norm)
        throw ShapeError("whitened_spectrum: matrix is not symmetric");
    if ((s_diag.array() <= 0.0).any()) throw ShapeError("whitened_spectrum: whitening entries must be positive");

    const Vector inv_sqrt = s_diag.array().rsqrt();
    Matrix W = inv_sqrt.asDiagonal() * L * inv_sqrt.asDiagonal();
    W = 0.5 * (W + W.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(W);
    if (es.info() != Eigen::Success) throw NumericalError("eigen-decomposition failed");

    SpectralDecomposition out;
    out.eigenvalues = es.eigenvalues();
    out.vectors = es.eigenvectors();
    out.degeneracy_groups = cluster_eigenvalues(out.eigenvalues);

    // The kernel of S^{-1/2} L S^{-1/2} for a zero-row-sum L is spanned by S^{1/2} 1.
    const double row_sum = (L * Vector::Ones(n)).cwiseAbs().maxCoeff();
    if (row_sum <= 1e-9 * norm && n > 0 && std::abs(out.eigenvalues(0)) <= 1e-9 * norm &&
        (out.degeneracy_groups.front().size() == 1)) {
        Vector u1 = s_diag.array().sqrt();
        u1 /= u1.norm();
        if ((s_diag.array() == s_diag(0)).all()) u1.setConstant(1.0 / std::sqrt(static_cast<double>(n)));
        out.vectors.col(0) = u1;
        out.eigenvalues(0) = 0.0;
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double v = out.vectors(i, j);
            if (std::abs(v) > 1e-12) {
                if (v < 0) out.vectors.col(j) *= -1.0;
                break;
            }
        }
    }
    return out;
}

}  // namespace gridfluct
