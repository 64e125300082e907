#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gridfluct/linalg.hpp"
#include "gridfluct/swing.hpp"
#include "gridfluct/variance.hpp"

namespace gridfluct {

enum class GraphKind { complete, star };

std::string graph_kind_name(GraphKind k);

/// Identical inertia, damping and line weights on a canonical complete or star graph.
struct HomogeneousParams {
    std::size_t n = 2;
    double gamma = 1.0;    // line weight
    double eta = 1.0;      // inertia
    double damping = 1.0;
    Vector noise;          // length n

    void validate() const;
};

/// The corresponding linear system on the canonical graph.
LinearizedSystem homogeneous_system(GraphKind kind, const HomogeneousParams& p);

CovarianceReport complete_report(const HomogeneousParams& p);
CovarianceReport star_report(const HomogeneousParams& p);

struct SingleSourceSummary {
    double q_at_source = 0.0;
    double q_elsewhere = 0.0;
    double q_incident_lines = 0.0;
    double q_other_lines = 0.0;
};

/// Requires exactly one nonzero noise entry, located at `source` (0-based).
SingleSourceSummary complete_single_source(const HomogeneousParams& p, std::size_t source);
/// Disturbance at the root only; the summary coincides with the complete-graph one.
SingleSourceSummary star_single_source_root(const HomogeneousParams& p);

struct StarLeafSummary {
    double q_root = 0.0;
    double q_source = 0.0;
    double q_other_nodes = 0.0;
    double q_source_line = 0.0;
    double q_other_lines = 0.0;
};

/// Disturbance at node 2 (index 1) only.
StarLeafSummary star_single_source_leaf(const HomogeneousParams& p);

Matrix complete_first_order(const HomogeneousParams& p);
Matrix star_first_order(const HomogeneousParams& p);

/// floor(1 + sqrt(1 + 2 d^2 / (gamma eta))).
std::size_t critical_size(double damping, double gamma, double eta);

enum class Sign { negative, nonpositive, positive, nonnegative };

struct TrendEntry {
    std::string quantity;
    std::string variable;
    double analytic = 0.0;
    double finite_difference = 0.0;
    double relative_error = 0.0;
    Sign expected = Sign::negative;
    bool sign_ok = false;
    bool fd_ok = false;
};

struct TrendLimit {
    std::string quantity;
    std::string variable;  // "gamma->inf", "n->inf", "eta->0+"
    double value = 0.0;
    double approach = 0.0;  // closed form evaluated far along the limit
    double relative_error = 0.0;
    bool ok = false;
};

/// Derivatives, limits and the critical size for a single disturbed node. Derivatives are
/// checked against central finite differences (step 1e-5 relative, quad precision). The
/// size n is treated as a continuous variable here.
struct TrendReport {
    GraphKind kind = GraphKind::complete;
    std::size_t source = 0;
    std::optional<std::size_t> critical_size;
    std::optional<double> lower_bound;  // complete graph: bound on the source frequency variance over all n
    std::vector<TrendEntry> derivatives;
    std::vector<TrendLimit> limits;

    bool all_ok() const;
};

TrendReport trend_report(GraphKind kind, const HomogeneousParams& p, std::size_t source);

bool sign_matches(double value, Sign s);

}  // namespace gridfluct
