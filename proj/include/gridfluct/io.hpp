#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gridfluct/closed_forms.hpp"
#include "gridfluct/monte_carlo.hpp"
#include "gridfluct/swing.hpp"
#include "gridfluct/variance.hpp"

namespace gridfluct {

constexpr int kSchemaVersion = 1;

/// Network file (JSON):
///   {"schema_version": 1,
///    "nodes": [{"id": "a", "inertia": 1, "damping": 1, "power": 0, "noise": 0.1}, ...],
///    "lines": [{"from": "a", "to": "b", "capacity": 2}, ...]}
/// power and noise default to 0. Line orientation follows from -> to.
PowerNetwork parse_network(const std::string& text, const std::string& source_name = "<input>");
PowerNetwork load_network(const std::string& path);
std::string network_to_json(const PowerNetwork& net);
void save_network(const std::string& path, const PowerNetwork& net);

std::string read_file(const std::string& path);
void write_output(const std::string& path, const std::string& content);  // "-" or "" is stdout

/// Parses a method name: numeric, uniform, closed, first-order, mc.
Method parse_method(const std::string& name);

/// Where a general network sits on a canonical complete or star graph.
struct HomogeneousMatch {
    GraphKind kind = GraphKind::complete;
    HomogeneousParams params;
    std::vector<std::size_t> canonical_to_node;  // node index for each canonical index
    std::vector<std::size_t> line_to_canonical;  // canonical line for each network line
    std::vector<double> line_sign;               // +1 when orientations agree, -1 otherwise
};

/// Throws AssumptionViolatedError unless the system has identical inertia, damping and line
/// weights on a complete or star topology.
HomogeneousMatch match_homogeneous(const LinearizedSystem& lin);

/// Closed-form report expressed in the system's own node and line order.
CovarianceReport closed_form_report(const LinearizedSystem& lin);

/// Linearizes the network around its synchronous state and evaluates one analytic route.
CovarianceReport run_variance(const PowerNetwork& net, Method method);
CovarianceReport run_variance(const LinearizedSystem& lin, Method method);

struct Comparison {
    std::vector<CovarianceReport> reports;  // numeric first
    std::vector<double> max_discrepancy;    // against the numeric report, one per entry
    std::vector<std::string> skipped;       // "method: reason"
};

/// Numeric route plus every other applicable route of the same model.
Comparison run_compare(const LinearizedSystem& lin);

/// Long CSV: quantity,index_i,index_j,value,method,stderr (1-based indices; symmetric
/// blocks as upper triangles). Numbers use 17 significant digits.
std::string report_to_csv(const CovarianceReport& rep);
std::string report_to_json(const CovarianceReport& rep, const PowerNetwork* net = nullptr);
std::string comparison_to_csv(const Comparison& cmp);
std::string comparison_to_json(const Comparison& cmp);

std::string state_to_csv(const PowerNetwork& net, const SynchronousState& st, const SecurityReport& sec);
std::string state_to_json(const PowerNetwork& net, const SynchronousState& st, const SecurityReport& sec);

/// Monte Carlo settings file: {"dt", "burn_in", "horizon", "trajectories", "seed",
/// "sample_stride", "substeps"}; missing keys keep SimConfig defaults.
SimConfig parse_sim_config(const std::string& text, const std::string& source_name = "<input>");

struct OutputSelector {
    std::string quantity;  // omega | delta | cross
    std::size_t i = 1;     // 1-based
    std::size_t j = 1;
    std::string label() const;
};

struct SweepAxis {
    std::string parameter;
    std::vector<double> values;
};

struct SweepSpec {
    // Exactly one base: homogeneous parameters or a network.
    std::optional<GraphKind> kind;
    HomogeneousParams params;
    std::vector<std::pair<std::size_t, double>> noise;  // 1-based node -> strength
    std::optional<PowerNetwork> network;

    std::vector<SweepAxis> axes;
    std::vector<Method> methods;
    std::vector<OutputSelector> outputs;
    SimConfig mc;
};

/// Sweep file (JSON): {"schema_version": 1,
///   "base": {"kind": "complete", "n": 20, "gamma": 10, "eta": 0.5, "d": 0.3, "noise": {"2": 0.04}}
///        or {"network": "file.json"} (relative to the sweep file),
///   "axes": [{"parameter": "eta", "values": [...]}, ...],
///   "methods": ["numeric", "closed"], "outputs": [{"quantity": "omega", "i": 2, "j": 2}],
///   "mc": {...}}
/// Homogeneous axes: n, gamma, eta, d, b<k>. Network axes: inertia, damping, capacity,
/// noise:<id>, power:<id>.
SweepSpec parse_sweep(const std::string& text, const std::string& base_dir = ".",
                      const std::string& source_name = "<input>");

struct SweepRow {
    std::vector<double> point;
    Method method = Method::numeric;
    std::vector<double> values;  // one per output selector; NaN when the route has no such block
};

struct SweepTable {
    std::vector<std::string> axis_names;
    std::vector<std::string> output_names;
    std::vector<SweepRow> rows;
};

/// Cartesian product of the axes (first axis outermost), one row per point and method.
SweepTable run_sweep(const SweepSpec& spec, std::size_t threads = 0);
std::string sweep_to_csv(const SweepTable& table);
std::string sweep_to_json(const SweepTable& table);

}  // namespace gridfluct
