#include "gridfluct/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gridfluct/errors.hpp"
#include "gridfluct/graph.hpp"
#include "gridfluct/parallel.hpp"

namespace gridfluct {

using nlohmann::json;

namespace {

std::string num(double v) {
    if (!std::isfinite(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string json_num(double v) { return std::isfinite(v) ? num(v) : "null"; }

std::string json_str(const std::string& s) { return json(s).dump(); }

json parse_json(const std::string& text, const std::string& source_name) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // nlohmann reports "at line L, column C" in what().
        throw ParseError(source_name + ": " + e.what());
    }
}

const json& require_field(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.is_object()) throw ValidationError(where + " must be an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ValidationError(where + "." + key + " is missing");
    return *it;
}

double as_number(const json& v, const std::string& field) {
    if (!v.is_number()) throw ValidationError(field + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ValidationError(field + " must be finite");
    return x;
}

double number_field(const json& obj, const std::string& key, const std::string& where) {
    return as_number(require_field(obj, key, where), where + "." + key);
}

double number_field_or(const json& obj, const std::string& key, const std::string& where, double fallback) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    return as_number(*it, where + "." + key);
}

std::string id_value(const json& v, const std::string& field) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    throw ValidationError(field + " must be a string or an integer");
}

std::size_t positive_index(const json& v, const std::string& field) {
    if (!v.is_number_integer() || v.get<long long>() < 1) throw ValidationError(field + " must be a positive integer");
    return static_cast<std::size_t>(v.get<long long>());
}

void check_schema(const json& doc, const std::string& where) {
    const json& v = require_field(doc, "schema_version", where);
    if (!v.is_number_integer() || v.get<int>() != kSchemaVersion)
        throw ValidationError(where + ".schema_version must be " + std::to_string(kSchemaVersion));
}

PowerNetwork network_from_json(const json& doc) {
    check_schema(doc, "network");
    const json& nodes = require_field(doc, "nodes", "network");
    const json& lines = require_field(doc, "lines", "network");
    if (!nodes.is_array() || nodes.empty()) throw ValidationError("nodes must be a non-empty array");
    if (!lines.is_array()) throw ValidationError("lines must be an array");

    const auto n = static_cast<Eigen::Index>(nodes.size());
    std::vector<std::string> ids;
    std::map<std::string, std::size_t> index;
    Vector inertia(n), damping(n), power(n), noise(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const std::string where = "nodes[" + std::to_string(i) + "]";
        const json& node = nodes[static_cast<std::size_t>(i)];
        const std::string id = id_value(require_field(node, "id", where), where + ".id");
        if (!index.emplace(id, static_cast<std::size_t>(i)).second)
            throw ValidationError(where + ".id: duplicate node id \"" + id + "\"");
        ids.push_back(id);
        inertia(i) = number_field(node, "inertia", where);
        damping(i) = number_field(node, "damping", where);
        power(i) = number_field_or(node, "power", where, 0.0);
        noise(i) = number_field_or(node, "noise", where, 0.0);
        if (!(inertia(i) > 0.0)) throw ValidationError(where + ".inertia must be positive");
        if (!(damping(i) > 0.0)) throw ValidationError(where + ".damping must be positive");
        if (!(noise(i) >= 0.0)) throw ValidationError(where + ".noise must be non-negative");
    }

    std::vector<Edge> edges;
    std::set<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t k = 0; k < lines.size(); ++k) {
        const std::string where = "lines[" + std::to_string(k) + "]";
        const json& line = lines[k];
        auto lookup = [&](const char* key) {
            const std::string id = id_value(require_field(line, key, where), where + "." + key);
            auto it = index.find(id);
            if (it == index.end()) throw ValidationError(where + "." + key + ": unknown node id \"" + id + "\"");
            return it->second;
        };
        const std::size_t a = lookup("from");
        const std::size_t b = lookup("to");
        const double cap = number_field(line, "capacity", where);
        if (a == b) throw ValidationError(where + ": line joins a node to itself");
        if (!(cap > 0.0)) throw ValidationError(where + ".capacity must be positive");
        if (!pairs.insert(std::minmax(a, b)).second) throw ValidationError(where + ": duplicate line");
        edges.push_back({a, b, cap});
    }
    WeightedGraph g(static_cast<std::size_t>(n), std::move(edges));
    if (!is_connected(g)) throw ConnectivityError("network is not connected");
    return PowerNetwork(std::move(g), inertia, damping, power, noise, ids);
}

Method method_for(const std::string& s) {
    if (s == "numeric") return Method::numeric;
    if (s == "uniform" || s == "uniform-ratio") return Method::uniform_ratio;
    if (s == "closed" || s == "closed-form") return Method::closed_form;
    if (s == "first-order") return Method::first_order;
    if (s == "mc" || s == "monte-carlo") return Method::monte_carlo;
    throw ValidationError("unknown method \"" + s + "\" (numeric, uniform, closed, first-order, mc)");
}

bool all_equal(const Vector& v, double rel) {
    return ((v.array() - v(0)).abs() <= rel * std::abs(v(0))).all();
}

}  // namespace

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file " + path);
    out << content;
}

PowerNetwork parse_network(const std::string& text, const std::string& source_name) {
    return network_from_json(parse_json(text, source_name));
}

PowerNetwork load_network(const std::string& path) { return parse_network(read_file(path), path); }

std::string network_to_json(const PowerNetwork& net) {
    std::ostringstream o;
    o << "{\n  \"schema_version\": " << kSchemaVersion << ",\n  \"nodes\": [\n";
    const auto& ids = net.node_ids();
    for (std::size_t i = 0; i < net.node_count(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        o << "    {\"id\": " << json_str(ids[i]) << ", \"inertia\": " << json_num(net.inertia()(k))
          << ", \"damping\": " << json_num(net.damping()(k)) << ", \"power\": " << json_num(net.power()(k))
          << ", \"noise\": " << json_num(net.noise()(k)) << "}" << (i + 1 < net.node_count() ? "," : "") << "\n";
    }
    o << "  ],\n  \"lines\": [\n";
    for (std::size_t k = 0; k < net.line_count(); ++k) {
        const Edge& e = net.topology().edge(k);
        o << "    {\"from\": " << json_str(ids[e.from]) << ", \"to\": " << json_str(ids[e.to])
          << ", \"capacity\": " << json_num(e.weight) << "}" << (k + 1 < net.line_count() ? "," : "") << "\n";
    }
    o << "  ]\n}\n";
    return o.str();
}

void save_network(const std::string& path, const PowerNetwork& net) { write_output(path, network_to_json(net)); }

Method parse_method(const std::string& name) { return method_for(name); }

HomogeneousMatch match_homogeneous(const LinearizedSystem& lin) {
    const std::size_t n = lin.node_count();
    const std::size_t m = lin.line_count();
    const std::string what = "closed forms are defined only for complete or star graphs with identical "
                             "inertia, damping and line weights";
    if (n < 2) throw AssumptionViolatedError(what + " (need at least 2 nodes)");
    if (!all_equal(lin.inertia, 1e-9)) throw AssumptionViolatedError(what + ": inertia differs between nodes");
    if (!all_equal(lin.damping, 1e-9)) throw AssumptionViolatedError(what + ": damping differs between nodes");
    Vector w(static_cast<Eigen::Index>(m));
    for (std::size_t k = 0; k < m; ++k) w(static_cast<Eigen::Index>(k)) = lin.graph.edge(k).weight;
    if (!all_equal(w, 1e-9)) throw AssumptionViolatedError(what + ": line weights differ");

    HomogeneousMatch match;
    std::vector<std::size_t> degree(n, 0);
    for (const Edge& e : lin.graph.edges()) {
        ++degree[e.from];
        ++degree[e.to];
    }
    if (m == n * (n - 1) / 2) {
        match.kind = GraphKind::complete;
        for (std::size_t i = 0; i < n; ++i) match.canonical_to_node.push_back(i);
    } else if (m == n - 1) {
        auto root = std::find(degree.begin(), degree.end(), n - 1);
        if (root == degree.end()) throw AssumptionViolatedError(what + ": topology is neither complete nor a star");
        match.kind = GraphKind::star;
        const auto r = static_cast<std::size_t>(root - degree.begin());
        match.canonical_to_node.push_back(r);
        for (std::size_t i = 0; i < n; ++i)
            if (i != r) match.canonical_to_node.push_back(i);
    } else {
        throw AssumptionViolatedError(what + ": topology is neither complete nor a star");
    }

    std::vector<std::size_t> node_to_canonical(n);
    for (std::size_t c = 0; c < n; ++c) node_to_canonical[match.canonical_to_node[c]] = c;
    const WeightedGraph canon =
        match.kind == GraphKind::complete ? canonical_complete(n, w(0)) : canonical_star(n, w(0));
    for (const Edge& e : lin.graph.edges()) {
        const std::size_t a = node_to_canonical[e.from];
        const std::size_t b = node_to_canonical[e.to];
        const auto q = canon.find_edge(a, b);
        if (!q) throw AssumptionViolatedError(what + ": topology is neither complete nor a star");
        match.line_to_canonical.push_back(*q);
        match.line_sign.push_back(canon.edge(*q).from == a ? 1.0 : -1.0);
    }

    match.params.n = n;
    match.params.gamma = w(0);
    match.params.eta = lin.inertia(0);
    match.params.damping = lin.damping(0);
    match.params.noise.resize(static_cast<Eigen::Index>(n));
    for (std::size_t c = 0; c < n; ++c)
        match.params.noise(static_cast<Eigen::Index>(c)) = lin.noise(static_cast<Eigen::Index>(match.canonical_to_node[c]));
    return match;
}

CovarianceReport closed_form_report(const LinearizedSystem& lin) {
    const HomogeneousMatch match = match_homogeneous(lin);
    const CovarianceReport canon =
        match.kind == GraphKind::complete ? complete_report(match.params) : star_report(match.params);
    const auto n = static_cast<Eigen::Index>(lin.node_count());
    const auto m = static_cast<Eigen::Index>(lin.line_count());
    CovarianceReport rep;
    rep.method = Method::closed_form;
    rep.q_omega.resize(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b)
            rep.q_omega(static_cast<Eigen::Index>(match.canonical_to_node[static_cast<std::size_t>(a)]),
                        static_cast<Eigen::Index>(match.canonical_to_node[static_cast<std::size_t>(b)])) =
                canon.q_omega(a, b);
    rep.q_delta.resize(m, m);
    for (Eigen::Index k = 0; k < m; ++k)
        for (Eigen::Index l = 0; l < m; ++l) {
            const auto ks = static_cast<std::size_t>(k), ls = static_cast<std::size_t>(l);
            rep.q_delta(k, l) = match.line_sign[ks] * match.line_sign[ls] *
                                canon.q_delta(static_cast<Eigen::Index>(match.line_to_canonical[ks]),
                                              static_cast<Eigen::Index>(match.line_to_canonical[ls]));
        }
    return rep;
}

CovarianceReport run_variance(const LinearizedSystem& lin, Method method) {
    switch (method) {
        case Method::numeric: return asymptotic_variance_numeric(lin);
        case Method::uniform_ratio: return asymptotic_variance_uniform_ratio(lin);
        case Method::closed_form: return closed_form_report(lin);
        case Method::first_order: return to_report(first_order_variance(lin));
        case Method::monte_carlo:
            throw PreconditionError("Monte Carlo estimates need a simulation config (use simulate)");
    }
    throw Error("unknown method");
}

CovarianceReport run_variance(const PowerNetwork& net, Method method) {
    const SynchronousState st = solve_synchronous_state(net);
    return run_variance(linearize(net, st), method);
}

Comparison run_compare(const LinearizedSystem& lin) {
    Comparison cmp;
    cmp.reports.push_back(asymptotic_variance_numeric(lin));
    cmp.max_discrepancy.push_back(0.0);
    for (Method m : {Method::uniform_ratio, Method::closed_form}) {
        try {
            CovarianceReport r = run_variance(lin, m);
            cmp.max_discrepancy.push_back(report_discrepancy(r, cmp.reports.front()));
            cmp.reports.push_back(std::move(r));
        } catch (const AssumptionError& e) {
            cmp.skipped.push_back(method_name(m) + ": " + e.what());
        }
    }
    return cmp;
}

namespace {

void csv_block(std::ostringstream& o, const char* name, const Matrix& q, const Matrix& se, bool symmetric,
               const std::string& method) {
    for (Eigen::Index i = 0; i < q.rows(); ++i)
        for (Eigen::Index j = symmetric ? i : 0; j < q.cols(); ++j) {
            o << name << ',' << i + 1 << ',' << j + 1 << ',' << num(q(i, j)) << ',' << method << ',';
            if (se.size() > 0) o << num(se(i, j));
            o << '\n';
        }
}

std::string json_matrix(const Matrix& q) {
    std::ostringstream o;
    o << '[';
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
        o << (i ? ", " : "") << '[';
        for (Eigen::Index j = 0; j < q.cols(); ++j) o << (j ? ", " : "") << json_num(q(i, j));
        o << ']';
    }
    o << ']';
    return o.str();
}

}  // namespace

std::string report_to_csv(const CovarianceReport& rep) {
    std::ostringstream o;
    o << "quantity,index_i,index_j,value,method,stderr\n";
    const std::string method = method_name(rep.method);
    csv_block(o, "omega", rep.q_omega, rep.stderr_omega, true, method);
    csv_block(o, "delta", rep.q_delta, rep.stderr_delta, true, method);
    csv_block(o, "cross", rep.q_delta_omega, rep.stderr_delta_omega, false, method);
    return o.str();
}

std::string report_to_json(const CovarianceReport& rep, const PowerNetwork* net) {
    std::ostringstream o;
    o << "{\n  \"method\": " << json_str(method_name(rep.method));
    if (net) {
        o << ",\n  \"nodes\": [";
        for (std::size_t i = 0; i < net->node_count(); ++i) o << (i ? ", " : "") << json_str(net->node_ids()[i]);
        o << "],\n  \"lines\": [";
        for (std::size_t k = 0; k < net->line_count(); ++k) {
            const Edge& e = net->topology().edge(k);
            o << (k ? ", " : "") << '[' << json_str(net->node_ids()[e.from]) << ", " << json_str(net->node_ids()[e.to])
              << ']';
        }
        o << ']';
    }
    auto block = [&](const char* key, const Matrix& q) {
        if (q.size() > 0) o << ",\n  \"" << key << "\": " << json_matrix(q);
    };
    block("q_omega", rep.q_omega);
    block("q_delta", rep.q_delta);
    block("q_delta_omega", rep.q_delta_omega);
    block("stderr_omega", rep.stderr_omega);
    block("stderr_delta", rep.stderr_delta);
    block("stderr_delta_omega", rep.stderr_delta_omega);
    if (rep.method == Method::numeric) o << ",\n  \"lyapunov_residual\": " << json_num(rep.lyapunov_residual);
    if (rep.method == Method::monte_carlo) o << ",\n  \"samples\": " << rep.samples;
    o << "\n}\n";
    return o.str();
}

std::string comparison_to_csv(const Comparison& cmp) {
    std::ostringstream o;
    o << "method,max_discrepancy,omega_discrepancy,delta_discrepancy,cross_discrepancy\n";
    const CovarianceReport& ref = cmp.reports.front();
    auto part = [](const Matrix& a, const Matrix& b) {
        return (a.size() > 0 && b.size() > 0) ? num(relative_discrepancy(a, b)) : std::string();
    };
    for (std::size_t i = 0; i < cmp.reports.size(); ++i) {
        const CovarianceReport& r = cmp.reports[i];
        o << method_name(r.method) << ',' << num(cmp.max_discrepancy[i]) << ',' << part(r.q_omega, ref.q_omega) << ','
          << part(r.q_delta, ref.q_delta) << ',' << part(r.q_delta_omega, ref.q_delta_omega) << '\n';
    }
    return o.str();
}

std::string comparison_to_json(const Comparison& cmp) {
    std::ostringstream o;
    o << "{\n  \"reference\": \"numeric\",\n  \"methods\": [";
    for (std::size_t i = 0; i < cmp.reports.size(); ++i)
        o << (i ? ", " : "") << "{\"method\": " << json_str(method_name(cmp.reports[i].method))
          << ", \"max_discrepancy\": " << json_num(cmp.max_discrepancy[i]) << '}';
    o << "],\n  \"skipped\": [";
    for (std::size_t i = 0; i < cmp.skipped.size(); ++i) o << (i ? ", " : "") << json_str(cmp.skipped[i]);
    o << "]\n}\n";
    return o.str();
}

std::string state_to_csv(const PowerNetwork& net, const SynchronousState& st, const SecurityReport& sec) {
    std::ostringstream o;
    o << "quantity,index,label,value\n";
    o << "sync_frequency,,," << num(st.sync_frequency) << '\n';
    o << "residual_norm,,," << num(st.residual_norm) << '\n';
    o << "secure,,," << (sec.secure ? 1 : 0) << '\n';
    for (std::size_t i = 0; i < net.node_count(); ++i)
        o << "angle," << i + 1 << ',' << net.node_ids()[i] << ',' << num(st.angles(static_cast<Eigen::Index>(i))) << '\n';
    for (std::size_t k = 0; k < net.line_count(); ++k) {
        const Edge& e = net.topology().edge(k);
        o << "margin," << k + 1 << ',' << net.node_ids()[e.from] << '-' << net.node_ids()[e.to] << ','
          << num(sec.margins(static_cast<Eigen::Index>(k))) << '\n';
    }
    return o.str();
}

std::string state_to_json(const PowerNetwork& net, const SynchronousState& st, const SecurityReport& sec) {
    std::ostringstream o;
    o << "{\n  \"sync_frequency\": " << json_num(st.sync_frequency) << ",\n  \"residual_norm\": "
      << json_num(st.residual_norm) << ",\n  \"iterations\": " << st.iterations
      << ",\n  \"secure\": " << (sec.secure ? "true" : "false") << ",\n  \"angles\": {";
    for (std::size_t i = 0; i < net.node_count(); ++i)
        o << (i ? ", " : "") << json_str(net.node_ids()[i]) << ": " << json_num(st.angles(static_cast<Eigen::Index>(i)));
    o << "},\n  \"margins\": [";
    for (std::size_t k = 0; k < net.line_count(); ++k) o << (k ? ", " : "") << json_num(sec.margins(static_cast<Eigen::Index>(k)));
    o << "]\n}\n";
    return o.str();
}

namespace {

SimConfig sim_config_from_json(const json& doc, const std::string& where) {
    if (!doc.is_object()) throw ValidationError(where + " must be an object");
    SimConfig cfg;
    cfg.dt = number_field_or(doc, "dt", where, cfg.dt);
    cfg.burn_in = number_field_or(doc, "burn_in", where, cfg.burn_in);
    cfg.horizon = number_field_or(doc, "horizon", where, cfg.horizon);
    auto count = [&](const char* key, std::size_t fallback) -> std::size_t {
        auto it = doc.find(key);
        if (it == doc.end()) return fallback;
        return positive_index(*it, where + "." + key);
    };
    cfg.trajectories = count("trajectories", cfg.trajectories);
    cfg.sample_stride = count("sample_stride", cfg.sample_stride);
    cfg.substeps = count("substeps", cfg.substeps);
    if (auto it = doc.find("seed"); it != doc.end()) {
        if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<long long>() >= 0))
            throw ValidationError(where + ".seed must be a non-negative integer");
        cfg.master_seed = it->get<std::uint64_t>();
    }
    if (cfg.dt < 0.0) throw ValidationError(where + ".dt must be positive");
    if (cfg.burn_in < 0.0) throw ValidationError(where + ".burn_in must be non-negative");
    if (!(cfg.horizon > 0.0)) throw ValidationError(where + ".horizon must be positive");
    return cfg;
}

}  // namespace

SimConfig parse_sim_config(const std::string& text, const std::string& source_name) {
    return sim_config_from_json(parse_json(text, source_name), "mc");
}

std::string OutputSelector::label() const { return quantity + "_" + std::to_string(i) + "_" + std::to_string(j); }

SweepSpec parse_sweep(const std::string& text, const std::string& base_dir, const std::string& source_name) {
    const json doc = parse_json(text, source_name);
    check_schema(doc, "sweep");
    SweepSpec spec;

    const json& base = require_field(doc, "base", "sweep");
    if (base.contains("network")) {
        const json& path = base["network"];
        if (!path.is_string()) throw ValidationError("base.network must be a file path");
        std::filesystem::path p(path.get<std::string>());
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        spec.network = load_network(p.string());
    } else {
        const json& kind = require_field(base, "kind", "base");
        if (kind == "complete")
            spec.kind = GraphKind::complete;
        else if (kind == "star")
            spec.kind = GraphKind::star;
        else
            throw ValidationError("base.kind must be \"complete\" or \"star\"");
        spec.params.n = positive_index(require_field(base, "n", "base"), "base.n");
        spec.params.gamma = number_field(base, "gamma", "base");
        spec.params.eta = number_field(base, "eta", "base");
        spec.params.damping = number_field(base, "d", "base");
        if (auto it = base.find("noise"); it != base.end()) {
            if (!it->is_object()) throw ValidationError("base.noise must map node numbers to strengths");
            for (const auto& [key, val] : it->items()) {
                std::size_t node = 0;
                try {
                    node = static_cast<std::size_t>(std::stoul(key));
                } catch (const std::exception&) {
                    throw ValidationError("base.noise: key \"" + key + "\" is not a node number");
                }
                if (node < 1) throw ValidationError("base.noise: node numbers start at 1");
                const double b = as_number(val, "base.noise." + key);
                if (b < 0) throw ValidationError("base.noise." + key + " must be non-negative");
                spec.noise.emplace_back(node, b);
            }
        }
    }

    const json& axes = require_field(doc, "axes", "sweep");
    if (!axes.is_array()) throw ValidationError("axes must be an array");
    for (std::size_t a = 0; a < axes.size(); ++a) {
        const std::string where = "axes[" + std::to_string(a) + "]";
        const json& ax = axes[a];
        const json& par = require_field(ax, "parameter", where);
        if (!par.is_string()) throw ValidationError(where + ".parameter must be a string");
        SweepAxis axis{par.get<std::string>(), {}};
        const std::string& name = axis.parameter;
        const bool known = spec.network
                               ? (name == "inertia" || name == "damping" || name == "capacity" ||
                                  name.rfind("noise:", 0) == 0 || name.rfind("power:", 0) == 0)
                               : (name == "n" || name == "gamma" || name == "eta" || name == "d" ||
                                  (name.size() > 1 && name[0] == 'b' &&
                                   name.find_first_not_of("0123456789", 1) == std::string::npos));
        if (!known) throw ValidationError(where + ".parameter \"" + name + "\" is not a sweepable parameter");
        if (spec.network && (name.rfind("noise:", 0) == 0 || name.rfind("power:", 0) == 0)) {
            const std::string id = name.substr(name.find(':') + 1);
            const auto& ids = spec.network->node_ids();
            if (std::find(ids.begin(), ids.end(), id) == ids.end())
                throw ValidationError(where + ".parameter: unknown node id \"" + id + "\"");
        }
        const json& vals = require_field(ax, "values", where);
        if (!vals.is_array() || vals.empty()) throw ValidationError(where + ".values must be a non-empty array");
        for (std::size_t v = 0; v < vals.size(); ++v)
            axis.values.push_back(as_number(vals[v], where + ".values[" + std::to_string(v) + "]"));
        spec.axes.push_back(std::move(axis));
    }

    const json& methods = require_field(doc, "methods", "sweep");
    if (!methods.is_array() || methods.empty()) throw ValidationError("methods must be a non-empty array");
    for (std::size_t i = 0; i < methods.size(); ++i) {
        if (!methods[i].is_string()) throw ValidationError("methods[" + std::to_string(i) + "] must be a string");
        spec.methods.push_back(method_for(methods[i].get<std::string>()));
    }

    const json& outputs = require_field(doc, "outputs", "sweep");
    if (!outputs.is_array() || outputs.empty()) throw ValidationError("outputs must be a non-empty array");
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        const std::string where = "outputs[" + std::to_string(i) + "]";
        OutputSelector sel;
        const json& q = require_field(outputs[i], "quantity", where);
        if (!q.is_string() || (q != "omega" && q != "delta" && q != "cross"))
            throw ValidationError(where + ".quantity must be omega, delta or cross");
        sel.quantity = q.get<std::string>();
        sel.i = positive_index(require_field(outputs[i], "i", where), where + ".i");
        sel.j = positive_index(require_field(outputs[i], "j", where), where + ".j");
        spec.outputs.push_back(sel);
    }

    if (auto it = doc.find("mc"); it != doc.end()) spec.mc = sim_config_from_json(*it, "mc");
    if (std::find(spec.methods.begin(), spec.methods.end(), Method::monte_carlo) != spec.methods.end() &&
        !doc.contains("mc"))
        throw ValidationError("sweep: method mc needs an \"mc\" block");
    return spec;
}

namespace {

LinearizedSystem sweep_system(const SweepSpec& spec, const std::vector<std::string>& names,
                              const std::vector<double>& point) {
    if (spec.network) {
        const PowerNetwork& base = *spec.network;
        Vector inertia = base.inertia(), damping = base.damping(), power = base.power(), noise = base.noise();
        std::vector<double> caps;
        for (const Edge& e : base.topology().edges()) caps.push_back(e.weight);
        const auto& ids = base.node_ids();
        auto node_of = [&](const std::string& id) {
            return static_cast<Eigen::Index>(std::find(ids.begin(), ids.end(), id) - ids.begin());
        };
        for (std::size_t a = 0; a < names.size(); ++a) {
            const std::string& nm = names[a];
            const double v = point[a];
            if (nm == "inertia") inertia.setConstant(v);
            else if (nm == "damping") damping.setConstant(v);
            else if (nm == "capacity") std::fill(caps.begin(), caps.end(), v);
            else if (nm.rfind("noise:", 0) == 0) noise(node_of(nm.substr(6))) = v;
            else if (nm.rfind("power:", 0) == 0) power(node_of(nm.substr(6))) = v;
        }
        PowerNetwork net(base.topology().with_weights(caps), inertia, damping, power, noise, ids);
        return linearize(net, solve_synchronous_state(net));
    }

    HomogeneousParams p = spec.params;
    std::vector<std::pair<std::size_t, double>> noise = spec.noise;
    for (std::size_t a = 0; a < names.size(); ++a) {
        const std::string& nm = names[a];
        const double v = point[a];
        if (nm == "n") {
            if (v < 2 || v != std::floor(v)) throw ValidationError("axis n must take integer values >= 2");
            p.n = static_cast<std::size_t>(v);
        } else if (nm == "gamma") p.gamma = v;
        else if (nm == "eta") p.eta = v;
        else if (nm == "d") p.damping = v;
        else noise.emplace_back(static_cast<std::size_t>(std::stoul(nm.substr(1))), v);
    }
    p.noise = Vector::Zero(static_cast<Eigen::Index>(p.n));
    for (const auto& [node, b] : noise) {
        if (node > p.n) throw ValidationError("noise at node " + std::to_string(node) + " exceeds n = " + std::to_string(p.n));
        p.noise(static_cast<Eigen::Index>(node - 1)) = b;
    }
    return homogeneous_system(*spec.kind, p);
}

double select(const CovarianceReport& rep, const OutputSelector& s) {
    const Matrix& q = s.quantity == "omega" ? rep.q_omega : s.quantity == "delta" ? rep.q_delta : rep.q_delta_omega;
    if (q.size() == 0) return std::numeric_limits<double>::quiet_NaN();
    if (s.i > static_cast<std::size_t>(q.rows()) || s.j > static_cast<std::size_t>(q.cols()))
        throw ValidationError("output " + s.label() + " is out of range");
    return q(static_cast<Eigen::Index>(s.i - 1), static_cast<Eigen::Index>(s.j - 1));
}

}  // namespace

SweepTable run_sweep(const SweepSpec& spec, std::size_t threads) {
    if (spec.methods.empty()) throw ValidationError("sweep: methods list is empty");
    if (spec.outputs.empty()) throw ValidationError("sweep: outputs list is empty");
    SweepTable table;
    for (const auto& ax : spec.axes) {
        if (ax.values.empty()) throw ValidationError("sweep: axis " + ax.parameter + " has no values");
        table.axis_names.push_back(ax.parameter);
    }
    for (const auto& o : spec.outputs) table.output_names.push_back(o.label());

    std::vector<std::vector<double>> points{{}};
    for (const auto& ax : spec.axes) {
        std::vector<std::vector<double>> next;
        for (const auto& pt : points)
            for (double v : ax.values) {
                auto q = pt;
                q.push_back(v);
                next.push_back(std::move(q));
            }
        points = std::move(next);
    }

    const std::size_t nm = spec.methods.size();
    table.rows.resize(points.size() * nm);
    // Monte Carlo runs parallelize internally; analytic points run concurrently.
    parallel_for(points.size(), threads, [&](std::size_t idx) {
        const LinearizedSystem lin = sweep_system(spec, table.axis_names, points[idx]);
        for (std::size_t k = 0; k < nm; ++k) {
            const Method m = spec.methods[k];
            CovarianceReport rep;
            if (m == Method::monte_carlo)
                rep = simulate_covariance(lin, spec.mc, 1);
            else if (m == Method::closed_form && !spec.network)
                rep = *spec.kind == GraphKind::complete ? complete_report(match_homogeneous(lin).params)
                                                        : star_report(match_homogeneous(lin).params);
            else
                rep = run_variance(lin, m);
            SweepRow& row = table.rows[idx * nm + k];
            row.point = points[idx];
            row.method = m;
            for (const auto& o : spec.outputs) row.values.push_back(select(rep, o));
        }
    });
    return table;
}

std::string sweep_to_csv(const SweepTable& t) {
    std::ostringstream o;
    for (const auto& a : t.axis_names) o << a << ',';
    o << "method";
    for (const auto& n : t.output_names) o << ',' << n;
    o << '\n';
    for (const auto& r : t.rows) {
        for (double v : r.point) o << num(v) << ',';
        o << method_name(r.method);
        for (double v : r.values) o << ',' << num(v);
        o << '\n';
    }
    return o.str();
}

std::string sweep_to_json(const SweepTable& t) {
    std::ostringstream o;
    o << "{\n  \"axes\": [";
    for (std::size_t i = 0; i < t.axis_names.size(); ++i) o << (i ? ", " : "") << json_str(t.axis_names[i]);
    o << "],\n  \"outputs\": [";
    for (std::size_t i = 0; i < t.output_names.size(); ++i) o << (i ? ", " : "") << json_str(t.output_names[i]);
    o << "],\n  \"rows\": [";
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const SweepRow& row = t.rows[r];
        o << (r ? "," : "") << "\n    {\"point\": [";
        for (std::size_t i = 0; i < row.point.size(); ++i) o << (i ? ", " : "") << json_num(row.point[i]);
        o << "], \"method\": " << json_str(method_name(row.method)) << ", \"values\": [";
        for (std::size_t i = 0; i < row.values.size(); ++i) o << (i ? ", " : "") << json_num(row.values[i]);
        o << "]}";
    }
    o << "\n  ]\n}\n";
    return o.str();
}

}  // namespace gridfluct
