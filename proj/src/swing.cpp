#include "gridfluct/swing.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

#include "gridfluct/errors.hpp"

namespace gridfluct {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw ValidationError(msg);
}

void check_vector(const Vector& v, std::size_t n, const char* name, bool strictly_positive, bool nonnegative) {
    if (static_cast<std::size_t>(v.size()) != n)
        throw ShapeError(std::string(name) + ": expected " + std::to_string(n) + " entries");
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const std::string field = std::string(name) + "[" + std::to_string(i + 1) + "]";
        require(std::isfinite(v(i)), field + " must be finite");
        if (strictly_positive) require(v(i) > 0.0, field + " must be positive");
        if (nonnegative) require(v(i) >= 0.0, field + " must be non-negative");
    }
}

}  // namespace

PowerNetwork::PowerNetwork(WeightedGraph topology, Vector inertia, Vector damping, Vector power, Vector noise,
                           std::vector<std::string> node_ids)
    : topology_(std::move(topology)),
      inertia_(std::move(inertia)),
      damping_(std::move(damping)),
      power_(std::move(power)),
      noise_(std::move(noise)),
      ids_(std::move(node_ids)) {
    const std::size_t n = topology_.node_count();
    check_vector(inertia_, n, "inertia", true, false);
    check_vector(damping_, n, "damping", true, false);
    check_vector(power_, n, "power", false, false);
    check_vector(noise_, n, "noise", false, true);
    if (ids_.empty())
        for (std::size_t i = 0; i < n; ++i) ids_.push_back(std::to_string(i + 1));
    if (ids_.size() != n) throw ShapeError("node_ids: expected " + std::to_string(n) + " entries");
    if (!is_connected(topology_)) throw ConnectivityError("network topology is not connected");
}

LinearizedSystem make_linearized_system(const WeightedGraph& weighted, const Vector& inertia, const Vector& damping,
                                        const Vector& noise) {
    const std::size_t n = weighted.node_count();
    check_vector(inertia, n, "inertia", true, false);
    check_vector(damping, n, "damping", true, false);
    check_vector(noise, n, "noise", false, true);
    return LinearizedSystem{weighted, laplacian(weighted), incidence(weighted), inertia, damping, noise};
}

double synchronized_frequency(const PowerNetwork& net) { return net.power().sum() / net.damping().sum(); }

Vector flow_residual(const PowerNetwork& net, const Vector& angles, double sync_frequency) {
    Vector r = net.power() - sync_frequency * net.damping();
    for (const Edge& e : net.topology().edges()) {
        const double s = e.weight * std::sin(angles(e.to) - angles(e.from));
        r(e.from) += s;
        r(e.to) -= s;
    }
    return r;
}

SynchronousState solve_synchronous_state(const PowerNetwork& net) {
    constexpr int kMaxIterations = 50;
    constexpr int kMaxHalvings = 10;
    constexpr double kTol = 1e-10;

    const std::size_t n = net.node_count();
    SynchronousState st;
    st.sync_frequency = synchronized_frequency(net);
    st.angles = Vector::Zero(n);
    Vector r = flow_residual(net, st.angles, st.sync_frequency);
    double rnorm = r.cwiseAbs().maxCoeff();
    if (n == 1) {
        st.residual_norm = rnorm;
        return st;
    }

    const auto m = static_cast<Eigen::Index>(n - 1);
    int it = 0;
    while (rnorm > kTol) {
        if (it >= kMaxIterations) {
            std::ostringstream msg;
            msg << "Newton iteration did not converge in " << kMaxIterations << " steps (residual " << rnorm << ")";
            throw NoSynchronousStateError(msg.str());
        }
        ++it;
        // d r / d angles = -L(K cos); the cosine weights may turn negative away from a secure state.
        Matrix Lc = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        for (const Edge& e : net.topology().edges()) {
            const double c = e.weight * std::cos(st.angles(e.to) - st.angles(e.from));
            Lc(e.from, e.from) += c;
            Lc(e.to, e.to) += c;
            Lc(e.from, e.to) -= c;
            Lc(e.to, e.from) -= c;
        }
        const Matrix J = -Lc.bottomRightCorner(m, m);
        Eigen::FullPivLU<Matrix> lu(J);
        if (!lu.isInvertible() || lu.rcond() < 1e-14) {
            std::ostringstream msg;
            msg << "singular Jacobian at Newton iterate " << it << " (reciprocal condition " << lu.rcond() << ")";
            throw NoSynchronousStateError(msg.str());
        }
        const Vector step = lu.solve(-r.tail(m));
        double t = 1.0;
        for (int h = 0; h <= kMaxHalvings; ++h) {
            Vector trial = st.angles;
            trial.tail(m) += t * step;
            Vector rt = flow_residual(net, trial, st.sync_frequency);
            const double tn = rt.cwiseAbs().maxCoeff();
            if (tn < rnorm || h == kMaxHalvings) {
                st.angles = std::move(trial);
                r = std::move(rt);
                rnorm = tn;
                break;
            }
            t *= 0.5;
        }
    }
    st.iterations = it;
    st.residual_norm = rnorm;
    return st;
}

SecurityReport security_check(const SynchronousState& state, const PowerNetwork& net) {
    SecurityReport rep;
    rep.margins.resize(static_cast<Eigen::Index>(net.line_count()));
    for (std::size_t k = 0; k < net.line_count(); ++k) {
        const Edge& e = net.topology().edge(k);
        const double margin = std::numbers::pi / 2 - std::abs(state.angles(e.from) - state.angles(e.to));
        rep.margins(static_cast<Eigen::Index>(k)) = margin;
        if (!(margin > 0.0)) rep.secure = false;
    }
    return rep;
}

LinearizedSystem linearize(const PowerNetwork& net, const SynchronousState& state) {
    const SecurityReport sec = security_check(state, net);
    if (!sec.secure) {
        Eigen::Index worst = 0;
        sec.margins.minCoeff(&worst);
        std::ostringstream msg;
        msg << "synchronous state violates the security condition |angle difference| < pi/2 on line "
            << worst + 1;
        throw InsecureStateError(msg.str());
    }
    std::vector<double> w;
    w.reserve(net.line_count());
    for (const Edge& e : net.topology().edges()) w.push_back(e.weight * std::cos(state.angles(e.from) - state.angles(e.to)));
    return make_linearized_system(net.topology().with_weights(w), net.inertia(), net.damping(), net.noise());
}

SmibVariance smib_variance(double inertia, double damping, double capacity, double power, double noise) {
    if (!(inertia > 0.0) || !(damping > 0.0)) throw PreconditionError("inertia and damping must be positive");
    if (!(noise >= 0.0)) throw PreconditionError("noise must be non-negative");
    if (!(std::abs(power) < capacity)) throw NoEquilibriumError("no equilibrium: |power| must be below the line capacity");
    const double b2 = noise * noise;
    return {b2 / (2.0 * damping * std::sqrt(capacity * capacity - power * power)), b2 / (2.0 * inertia * damping)};
}

}  // namespace gridfluct
