#include "gridfluct/closed_forms.hpp"

#include <cmath>
#include <functional>

#include "gridfluct/closed_form_expressions.hpp"
#include "gridfluct/errors.hpp"
#include "gridfluct/graph.hpp"

namespace gridfluct {

namespace {

using quad = __float128;

constexpr double kFdStep = 1e-5;
constexpr double kFdTol = 1e-6;

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

// Index of the single nonzero noise entry; PreconditionError otherwise.
std::size_t single_source(const HomogeneousParams& p) {
    std::optional<std::size_t> src;
    for (Eigen::Index i = 0; i < p.noise.size(); ++i) {
        if (p.noise(i) != 0.0) {
            if (src) throw PreconditionError("single-source formulas need exactly one nonzero noise entry");
            src = static_cast<std::size_t>(i);
        }
    }
    if (!src) throw PreconditionError("single-source formulas need exactly one nonzero noise entry");
    return *src;
}

}  // namespace

std::string graph_kind_name(GraphKind k) { return k == GraphKind::complete ? "complete" : "star"; }

void HomogeneousParams::validate() const {
    if (n < 2) throw InvalidSizeError("homogeneous network needs n >= 2");
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ValidationError("gamma must be positive");
    if (!(eta > 0.0) || !std::isfinite(eta)) throw ValidationError("eta must be positive");
    if (!(damping > 0.0) || !std::isfinite(damping)) throw ValidationError("d must be positive");
    if (static_cast<std::size_t>(noise.size()) != n) throw ShapeError("noise vector must have n entries");
    for (Eigen::Index i = 0; i < noise.size(); ++i)
        if (!(noise(i) >= 0.0) || !std::isfinite(noise(i)))
            throw ValidationError("noise[" + std::to_string(i + 1) + "] must be non-negative");
}

LinearizedSystem homogeneous_system(GraphKind kind, const HomogeneousParams& p) {
    p.validate();
    const WeightedGraph g = kind == GraphKind::complete ? canonical_complete(p.n, p.gamma) : canonical_star(p.n, p.gamma);
    const auto n = static_cast<Eigen::Index>(p.n);
    return make_linearized_system(g, Vector::Constant(n, p.eta), Vector::Constant(n, p.damping), p.noise);
}

CovarianceReport complete_report(const HomogeneousParams& p) {
    p.validate();
    const double n = static_cast<double>(p.n);
    const double g = p.gamma, eta = p.eta, d = p.damping;
    const Vector b2 = p.noise.array().square();
    const double tr = b2.sum();
    const double alpha = d / eta;
    const auto N = static_cast<Eigen::Index>(p.n);

    // Full frequency matrix; its diagonal is replaced by the per-node display below.
    const double c = alpha / (2 * alpha * alpha + g * n / eta);
    const Vector u1 = Vector::Constant(N, 1.0 / std::sqrt(n));
    const Matrix P1 = u1 * u1.transpose();
    const Matrix B2 = b2.asDiagonal();
    Matrix qw = (B2 / (2 * alpha) + (c - 1 / (2 * alpha)) * (P1 * B2 + B2 * P1) + (1 / alpha - 2 * c) * P1 * B2 * P1) /
                (eta * eta);
    const double own = 1 / (2 * d * eta) - g * (n - 1) / (d * n * (2 * d * d + g * eta * n));
    const double spill = g / (d * n * (2 * d * d + g * eta * n));
    for (Eigen::Index i = 0; i < N; ++i) qw(i, i) = own * b2(i) + spill * (tr - b2(i));

    const Matrix C = incidence(canonical_complete(p.n, 1.0));
    CovarianceReport rep;
    rep.method = Method::closed_form;
    rep.q_omega = symmetrized(qw);
    rep.q_delta = C.transpose() * B2 * C / (2 * d * g * n);
    return rep;
}

CovarianceReport star_report(const HomogeneousParams& p) {
    p.validate();
    const double n = static_cast<double>(p.n);
    const double g = p.gamma, eta = p.eta, d = p.damping;
    const Vector b2 = p.noise.array().square();
    const double tr = b2.sum();
    const double b1 = b2(0);
    const double alpha = d / eta;
    const auto N = static_cast<Eigen::Index>(p.n);
    const auto M = N - 1;
    const double E = 2 * d * d * (n + 1) + g * eta * (n - 1) * (n - 1);
    const double s1 = 2 * d * d + g * eta;
    const double sn = 2 * d * d + g * eta * n;

    // Full frequency matrix built from the two nontrivial eigen-directions of the star.
    const Vector u1 = Vector::Constant(N, 1.0 / std::sqrt(n));
    Vector un = Vector::Constant(N, -1.0);
    un(0) = n - 1;
    un /= std::sqrt(n * (n - 1));
    const Matrix P1 = u1 * u1.transpose();
    const Matrix Pn = un * un.transpose();
    const Matrix B2 = b2.asDiagonal();
    const double a2 = alpha * alpha;
    const double ge = g / eta;
    const double t1 = ge / (2 * alpha * (ge + 2 * a2));
    const double tn = ge * (n - 1) * (n - 1) / (2 * alpha * (ge * (n - 1) * (n - 1) + 2 * a2 * (1 + n)));
    const double tx = ge * (n - 1) * (ge * ge * n * (n - 1) + 4 * a2 * ge * (n - 1) - 8 * a2 * a2) /
                      (2 * alpha * (ge + 2 * a2) * (ge * n + 2 * a2) * (ge * (n - 1) * (n - 1) + 2 * a2 * (1 + n)));
    Matrix qw = (B2 / (2 * alpha) + t1 * (2 * P1 * B2 * P1 - P1 * B2 - B2 * P1) +
                 tn * (2 * Pn * B2 * Pn - Pn * B2 - B2 * Pn) + tx * (P1 * B2 * Pn + Pn * B2 * P1)) /
                (eta * eta);

    qw(0, 0) = (1 / (2 * d * eta) - g * (n - 1) / (d * n * sn)) * b1 + g / (d * n * sn) * (tr - b1);
    for (Eigen::Index i = 1; i < N; ++i) {
        const double bi = b2(i);
        const double rest = tr - bi - b1;
        qw(i, i) = g * b1 / (d * n * sn) + bi / (2 * d * eta) - g * bi / (d * n * sn) - g * (n - 2) * bi / (d * n * E) -
                   g * g * eta * (n - 2) * bi / (d * n * s1 * sn) + g * rest / (d * n * E) +
                   g * g * eta / (d * n * s1 * sn) * rest;
    }

    const double den = 2 * d * g * n * E;
    Matrix qd(M, M);
    for (Eigen::Index k = 0; k < M; ++k) {
        const double bk = b2(k + 1);
        for (Eigen::Index q = 0; q < M; ++q) {
            const double bq = b2(q + 1);
            if (k != q) {
                qd(k, q) = E / den * b1 + (-2 * d * d * (n - 1) + g * eta * (2 * n - n * n + 1)) / den * (bk + bq) +
                           (2 * d * d + g * eta * (n + 1)) * (tr - bk - bq - b1) / den;
            } else {
                qd(k, k) = b1 / (2 * d * g * n) +
                           ((n - 1) / (2 * d * g * n) - (n - 2) * (2 * d * d + g * eta * (n + 1)) / den) * bk +
                           (2 * d * d + g * eta * (n + 1)) * (tr - bk - b1) / den;
            }
        }
    }

    CovarianceReport rep;
    rep.method = Method::closed_form;
    rep.q_omega = symmetrized(qw);
    rep.q_delta = symmetrized(qd);
    return rep;
}

SingleSourceSummary complete_single_source(const HomogeneousParams& p, std::size_t source) {
    p.validate();
    if (source >= p.n) throw PreconditionError("source node out of range");
    if (single_source(p) != source) throw PreconditionError("the nonzero noise entry must sit at the source node");
    const double n = static_cast<double>(p.n);
    const double b2 = p.noise(static_cast<Eigen::Index>(source)) * p.noise(static_cast<Eigen::Index>(source));
    SingleSourceSummary s;
    s.q_at_source = formulas::complete_freq_source(n, p.gamma, p.eta, p.damping, b2);
    s.q_elsewhere = formulas::complete_freq_other(n, p.gamma, p.eta, p.damping, b2);
    s.q_incident_lines = formulas::complete_angle_incident(n, p.gamma, p.eta, p.damping, b2);
    s.q_other_lines = 0.0;
    return s;
}

SingleSourceSummary star_single_source_root(const HomogeneousParams& p) {
    p.validate();
    if (single_source(p) != 0) throw PreconditionError("root-source formulas need noise at node 1 only");
    return complete_single_source(p, 0);
}

StarLeafSummary star_single_source_leaf(const HomogeneousParams& p) {
    p.validate();
    if (single_source(p) != 1) throw PreconditionError("leaf-source formulas need noise at node 2 only");
    const double n = static_cast<double>(p.n);
    const double g = p.gamma, eta = p.eta, d = p.damping;
    const double b2 = p.noise(1) * p.noise(1);
    StarLeafSummary s;
    s.q_root = formulas::star_freq_root(n, g, eta, d, b2);
    s.q_source = formulas::star_freq_source(n, g, eta, d, b2);
    s.q_other_nodes = formulas::star_freq_other_leaf(n, g, eta, d, b2);
    s.q_source_line = formulas::star_angle_source_line(n, g, eta, d, b2);
    s.q_other_lines = formulas::star_angle_other_line(n, g, eta, d, b2);
    return s;
}

Matrix complete_first_order(const HomogeneousParams& p) {
    p.validate();
    const Matrix C = incidence(canonical_complete(p.n, 1.0));
    const Vector b2 = p.noise.array().square();
    return C.transpose() * b2.asDiagonal() * C / (2 * p.damping * p.gamma * static_cast<double>(p.n));
}

Matrix star_first_order(const HomogeneousParams& p) {
    p.validate();
    const double n = static_cast<double>(p.n);
    const double d = p.damping, g = p.gamma;
    const Vector b2 = p.noise.array().square();
    const double tr = b2.sum();
    const double b1 = b2(0);
    const auto M = static_cast<Eigen::Index>(p.n - 1);
    const double base = 2 * d * g * n;
    Matrix q(M, M);
    for (Eigen::Index k = 0; k < M; ++k) {
        const double bk = b2(k + 1);
        for (Eigen::Index j = 0; j < M; ++j) {
            const double bq = b2(j + 1);
            if (k != j)
                q(k, j) = b1 / base + (1 - n) * (bk + bq) / (base * (1 + n)) + (tr - bk - bq - b1) / (base * (1 + n));
            else
                q(k, k) = b1 / base + (n * n - n + 1) * bk / (base * (1 + n)) + (tr - bk - b1) / (base * (1 + n));
        }
    }
    return q;
}

std::size_t critical_size(double damping, double gamma, double eta) {
    if (!(damping > 0.0) || !(gamma > 0.0) || !(eta > 0.0))
        throw PreconditionError("critical size needs positive damping, weight and inertia");
    return static_cast<std::size_t>(std::floor(1.0 + std::sqrt(1.0 + 2.0 * damping * damping / (gamma * eta))));
}

bool sign_matches(double v, Sign s) {
    switch (s) {
        case Sign::negative: return v < 0.0;
        case Sign::nonpositive: return v <= 0.0;
        case Sign::positive: return v > 0.0;
        case Sign::nonnegative: return v >= 0.0;
    }
    return false;
}

bool TrendReport::all_ok() const {
    for (const auto& e : derivatives)
        if (!e.sign_ok || !e.fd_ok) return false;
    for (const auto& l : limits)
        if (!l.ok) return false;
    return true;
}

namespace {

using QuadFormula = std::function<quad(quad, quad, quad, quad, quad)>;

enum class Var { n, gamma, eta };

struct Point {
    quad n, g, eta, d, b2;
};

quad eval(const QuadFormula& f, const Point& p) { return f(p.n, p.g, p.eta, p.d, p.b2); }

quad& slot(Point& p, Var v) {
    switch (v) {
        case Var::n: return p.n;
        case Var::gamma: return p.g;
        case Var::eta: return p.eta;
    }
    return p.n;
}

const char* var_name(Var v) {
    switch (v) {
        case Var::n: return "n";
        case Var::gamma: return "gamma";
        case Var::eta: return "eta";
    }
    return "?";
}

quad qabs(quad x) { return x < 0 ? -x : x; }

TrendEntry derivative_entry(const std::string& quantity, Var v, const QuadFormula& value, const QuadFormula& derivative,
                            Sign expected, const Point& at) {
    TrendEntry e;
    e.quantity = quantity;
    e.variable = var_name(v);
    e.expected = expected;
    const quad an = eval(derivative, at);
    Point lo = at, hi = at;
    const quad x = slot(lo, v);
    const quad h = x * static_cast<quad>(kFdStep);
    slot(lo, v) = x - h;
    slot(hi, v) = x + h;
    const quad fd = (eval(value, hi) - eval(value, lo)) / (2 * h);
    e.analytic = static_cast<double>(an);
    e.finite_difference = static_cast<double>(fd);
    if (an != 0) {
        e.relative_error = static_cast<double>(qabs(fd - an) / qabs(an));
    } else {
        // Scale by the quantity itself when the derivative vanishes.
        const quad scale = qabs(eval(value, at)) / x;
        e.relative_error = scale > 0 ? static_cast<double>(qabs(fd) / scale) : static_cast<double>(qabs(fd));
    }
    e.fd_ok = e.relative_error <= kFdTol;
    e.sign_ok = sign_matches(e.analytic, expected);
    return e;
}

TrendLimit limit_entry(const std::string& quantity, const std::string& how, const QuadFormula& value,
                       const QuadFormula& limit, Point at) {
    TrendLimit l;
    l.quantity = quantity;
    l.variable = how;
    const quad lim = eval(limit, at);
    if (how == "gamma->inf")
        at.g *= static_cast<quad>(1e15);
    else if (how == "n->inf")
        at.n *= static_cast<quad>(1e15);
    else
        at.eta *= static_cast<quad>(1e-15);
    const quad far = eval(value, at);
    l.value = static_cast<double>(lim);
    l.approach = static_cast<double>(far);
    const quad scale = qabs(lim) > 0 ? qabs(lim) : quad(1);
    l.relative_error = static_cast<double>(qabs(far - lim) / scale);
    l.ok = l.relative_error <= 1e-9;
    return l;
}

#define GF_QUAD(fn) QuadFormula(&formulas::fn<quad>)

void add_complete_entries(TrendReport& r, const Point& pt, double n_value, std::size_t n_c) {
    using enum Sign;
    r.derivatives.push_back(derivative_entry("q_omega_source", Var::gamma, GF_QUAD(complete_freq_source),
                                             GF_QUAD(complete_dfreq_source_dgamma), negative, pt));
    r.derivatives.push_back(derivative_entry("q_omega_other", Var::gamma, GF_QUAD(complete_freq_other),
                                             GF_QUAD(complete_dfreq_other_dgamma), positive, pt));
    r.derivatives.push_back(derivative_entry("q_omega_source", Var::n, GF_QUAD(complete_freq_source),
                                             GF_QUAD(complete_dfreq_source_dn),
                                             n_value > static_cast<double>(n_c) ? positive : nonpositive, pt));
    r.derivatives.push_back(derivative_entry("q_omega_other", Var::n, GF_QUAD(complete_freq_other),
                                             GF_QUAD(complete_dfreq_other_dn), negative, pt));
    r.limits.push_back(limit_entry("q_omega_source", "gamma->inf", GF_QUAD(complete_freq_source),
                                   GF_QUAD(complete_freq_source_gamma_limit), pt));
    r.limits.push_back(limit_entry("q_omega_other", "gamma->inf", GF_QUAD(complete_freq_other),
                                   GF_QUAD(complete_freq_other_gamma_limit), pt));
    r.limits.push_back(
        limit_entry("q_omega_source", "n->inf", GF_QUAD(complete_freq_source), GF_QUAD(freq_source_n_limit), pt));
}

void add_star_leaf_entries(TrendReport& r, const Point& pt) {
    using enum Sign;
    r.derivatives.push_back(derivative_entry("q_omega_source", Var::gamma, GF_QUAD(star_freq_source),
                                             GF_QUAD(star_dfreq_source_dgamma), negative, pt));
    r.derivatives.push_back(derivative_entry("q_omega_source", Var::n, GF_QUAD(star_freq_source),
                                             GF_QUAD(star_dfreq_source_dn), positive, pt));
    r.derivatives.push_back(derivative_entry("q_delta_source_line", Var::eta, GF_QUAD(star_angle_source_line),
                                             GF_QUAD(star_dangle_source_line_deta), nonpositive, pt));
    r.derivatives.push_back(derivative_entry("q_delta_other_line", Var::eta, GF_QUAD(star_angle_other_line),
                                             GF_QUAD(star_dangle_other_line_deta), positive, pt));
    r.derivatives.push_back(derivative_entry("q_delta_source_line", Var::n, GF_QUAD(star_angle_source_line),
                                             GF_QUAD(star_dangle_source_line_dn), positive, pt));
    r.derivatives.push_back(derivative_entry("q_delta_other_line", Var::n, GF_QUAD(star_angle_other_line),
                                             GF_QUAD(star_dangle_other_line_dn), negative, pt));
    r.limits.push_back(limit_entry("q_omega_source", "gamma->inf", GF_QUAD(star_freq_source),
                                   GF_QUAD(star_freq_source_gamma_limit), pt));
    r.limits.push_back(
        limit_entry("q_omega_source", "n->inf", GF_QUAD(star_freq_source), GF_QUAD(freq_source_n_limit), pt));
    r.limits.push_back(limit_entry("q_delta_source_line", "eta->0+", GF_QUAD(star_angle_source_line),
                                   GF_QUAD(star_angle_source_line_eta_limit), pt));
    r.limits.push_back(limit_entry("q_delta_other_line", "eta->0+", GF_QUAD(star_angle_other_line),
                                   GF_QUAD(star_angle_other_line_eta_limit), pt));
}

#undef GF_QUAD

}  // namespace

TrendReport trend_report(GraphKind kind, const HomogeneousParams& p, std::size_t source) {
    p.validate();
    if (source >= p.n) throw PreconditionError("source node out of range");
    if (single_source(p) != source) throw PreconditionError("the nonzero noise entry must sit at the source node");
    const double b = p.noise(static_cast<Eigen::Index>(source));
    const Point pt{static_cast<quad>(static_cast<double>(p.n)), static_cast<quad>(p.gamma), static_cast<quad>(p.eta),
                   static_cast<quad>(p.damping), static_cast<quad>(b) * static_cast<quad>(b)};

    TrendReport r;
    r.kind = kind;
    r.source = source;
    if (kind == GraphKind::complete || source == 0) {
        // A disturbed star root behaves exactly like a node of the complete graph.
        const std::size_t n_c = critical_size(p.damping, p.gamma, p.eta);
        r.critical_size = n_c;
        add_complete_entries(r, pt, static_cast<double>(p.n), n_c);
        if (kind == GraphKind::complete) {
            const double ge = p.gamma * p.eta;
            const double root = std::sqrt(ge) + std::sqrt(ge + 2 * p.damping * p.damping);
            r.lower_bound = (1 / (2 * p.damping * p.eta) - p.gamma / (p.damping * root * root)) * b * b;
        }
    } else {
        add_star_leaf_entries(r, pt);
    }
    return r;
}

}  // namespace gridfluct
