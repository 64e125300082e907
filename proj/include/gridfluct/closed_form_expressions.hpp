#pragma once

// Scalar variance formulas for homogeneous complete and star networks with a single
// disturbed node. Templated on the scalar type so that finite differences can be taken in
// extended precision. Arguments: size n, line weight g, inertia eta, damping d and the
// squared noise strength b2 of the disturbed node.

namespace gridfluct::formulas {

// Complete graph, disturbance at node i.

template <class T>
T complete_freq_source(T n, T g, T eta, T d, T b2) {
    return b2 / (2 * d * eta) - (n - 1) * g * b2 / (d * n * (2 * d * d + g * eta * n));
}

template <class T>
T complete_freq_other(T n, T g, T eta, T d, T b2) {
    return g * b2 / (d * n * (2 * d * d + g * eta * n));
}

template <class T>
T complete_angle_incident(T n, T g, T /*eta*/, T d, T b2) {
    return b2 / (2 * d * g * n);
}

template <class T>
T complete_dfreq_source_dgamma(T n, T g, T eta, T d, T b2) {
    const T s = 2 * d * d + g * eta * n;
    return 2 * d * (1 - n) * b2 / (n * s * s);
}

template <class T>
T complete_dfreq_other_dgamma(T n, T g, T eta, T d, T b2) {
    const T s = 2 * d * d + g * eta * n;
    return 2 * d * b2 / (n * s * s);
}

template <class T>
T complete_dfreq_source_dn(T n, T g, T eta, T d, T b2) {
    const T s = 2 * d * d * n + g * eta * n * n;
    return g * (g * eta * n * n - 2 * g * eta * n - 2 * d * d) / (d * s * s) * b2;
}

template <class T>
T complete_dfreq_other_dn(T n, T g, T eta, T d, T b2) {
    const T s = 2 * d * d * n + g * eta * n * n;
    return -g * (2 * d * d + 2 * g * eta * n) / (d * s * s) * b2;
}

template <class T>
T complete_freq_source_gamma_limit(T n, T /*g*/, T eta, T d, T b2) {
    return b2 / (2 * d * eta) - (n - 1) * b2 / (d * eta * n * n);
}

template <class T>
T complete_freq_other_gamma_limit(T n, T /*g*/, T eta, T d, T b2) {
    return b2 / (d * eta * n * n);
}

template <class T>
T freq_source_n_limit(T /*n*/, T /*g*/, T eta, T d, T b2) {
    return b2 / (2 * d * eta);
}

// Star graph rooted at node 1, disturbance at leaf node 2 (line 1 joins nodes 1 and 2).

template <class T>
T star_den(T n, T g, T eta, T d) {
    return 2 * d * d * (n + 1) + g * eta * (n - 1) * (n - 1);
}

template <class T>
T star_freq_root(T n, T g, T eta, T d, T b2) {
    return g * b2 / (d * n * (2 * d * d + g * eta * n));
}

template <class T>
T star_freq_source(T n, T g, T eta, T d, T b2) {
    const T s1 = 2 * d * d + g * eta;
    const T sn = 2 * d * d + g * eta * n;
    return b2 / (2 * d * eta) - g * b2 / (d * n * sn) - g * (n - 2) * b2 / (d * n * star_den(n, g, eta, d)) -
           g * g * eta * (n - 2) * b2 / (d * n * s1 * sn);
}

template <class T>
T star_freq_other_leaf(T n, T g, T eta, T d, T b2) {
    const T s1 = 2 * d * d + g * eta;
    const T sn = 2 * d * d + g * eta * n;
    return g * b2 / (d * n * star_den(n, g, eta, d)) + g * g * eta * b2 / (d * n * s1 * sn);
}

template <class T>
T star_angle_source_line(T n, T g, T eta, T d, T b2) {
    return ((n - 1) / (2 * d * g * n) -
            (n - 2) * (2 * d * d + g * eta * (n + 1)) / (2 * d * g * n * star_den(n, g, eta, d))) *
           b2;
}

template <class T>
T star_angle_other_line(T n, T g, T eta, T d, T b2) {
    return (2 * d * d + g * eta * (n + 1)) / (2 * d * g * n * star_den(n, g, eta, d)) * b2;
}

/// Derivative of star_freq_source in the line weight. The third term carries 4 d^2; with a
/// bare 4 in its place the expression is only correct for unit damping.
template <class T>
T star_dfreq_source_dgamma(T n, T g, T eta, T d, T b2) {
    const T s1 = 2 * d * d + g * eta;
    const T sn = 2 * d * d + g * eta * n;
    const T e = star_den(n, g, eta, d);
    return -2 * d * b2 / (n * sn * sn) - 2 * d * (n + 1) * (n - 2) * b2 / (n * e * e) -
           2 * d * g * eta * (4 * d * d + g * eta * (n + 1)) * (n - 2) * b2 / (n * s1 * s1 * sn * sn);
}

/// The same derivative with the constant 4 in the third numerator, as it is often quoted.
template <class T>
T star_dfreq_source_dgamma_unit_damping(T n, T g, T eta, T d, T b2) {
    const T s1 = 2 * d * d + g * eta;
    const T sn = 2 * d * d + g * eta * n;
    const T e = star_den(n, g, eta, d);
    return -2 * d * b2 / (n * sn * sn) - 2 * d * (n + 1) * (n - 2) * b2 / (n * e * e) -
           2 * d * g * eta * (4 + g * eta * (n + 1)) * (n - 2) * b2 / (n * s1 * s1 * sn * sn);
}

template <class T>
T star_freq_source_gamma_limit(T n, T /*g*/, T eta, T d, T b2) {
    return b2 / (2 * d * eta) - b2 / (d * eta) * (1 / n - 1 / (n * n * (n - 1) * (n - 1)));
}

template <class T>
T star_dfreq_source_dn(T n, T g, T eta, T d, T b2) {
    const T s1 = 2 * d * d + g * eta;
    const T sn = 2 * d * d + g * eta * n;
    const T e = star_den(n, g, eta, d);
    return 2 * g * b2 * (d * d + g * eta * n) / (d * n * n * sn * sn) -
           g * g * eta * b2 * (4 * d * d + g * eta * n * (4 - n)) / (d * n * n * s1 * sn * sn) +
           2 * g * b2 * (d * d * (n * n - 4 * n - 2) + g * eta * (n - 1) * (n * n - 3 * n + 1)) / (d * n * n * e * e);
}

template <class T>
T star_dangle_source_line_deta(T n, T g, T eta, T d, T b2) {
    const T e = star_den(n, g, eta, d);
    return -4 * (n - 2) * d * b2 / (e * e);
}

template <class T>
T star_dangle_other_line_deta(T n, T g, T eta, T d, T b2) {
    const T e = star_den(n, g, eta, d);
    return 4 * d * b2 / (e * e);
}

template <class T>
T star_angle_source_line_eta_limit(T n, T g, T /*eta*/, T d, T b2) {
    return ((n - 1) / (2 * d * g * n) - (n - 2) / (2 * d * g * n * (n + 1))) * b2;
}

template <class T>
T star_angle_other_line_eta_limit(T n, T g, T /*eta*/, T d, T b2) {
    return b2 / (2 * d * g * n * (n + 1));
}

template <class T>
T star_dangle_source_line_dn(T n, T g, T eta, T d, T b2) {
    const T e = star_den(n, g, eta, d);
    const T d2 = d * d;
    const T ge = g * eta;
    return (4 * d2 * d2 * (2 * n * n - 2 * n - 1) + 4 * d2 * ge * (2 * n * n * n - 6 * n * n + n - 1) +
            ge * ge * (n - 1) * (2 * n * n * n - 4 * n * n - 3 * n + 1)) /
           (2 * d * g * n * n * e * e) * b2;
}

template <class T>
T star_dangle_other_line_dn(T n, T g, T eta, T d, T b2) {
    const T e = star_den(n, g, eta, d);
    const T d2 = d * d;
    const T ge = g * eta;
    return -(4 * d2 * d2 * (1 + 2 * n) + 4 * d2 * ge * (2 * n * n - n + 1) +
             ge * ge * (n - 1) * (2 * n * n + 3 * n - 1)) /
           (2 * d * g * n * n * e * e) * b2;
}

}  // namespace gridfluct::formulas
