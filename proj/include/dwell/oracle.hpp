#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "dwell/model.hpp"

namespace dwell {

/// Configuration for the finite-difference ground-truth solve: half-width L
/// of the symmetric box and the number of interior points of the even-parity
/// half-domain reduction.
struct OracleConfig {
    double half_width;
    int n_points;

    OracleConfig(double half_width_, int n_points_ = 4000)
        : half_width(half_width_), n_points(n_points_) {
        if (!(half_width > 1.0)) throw std::invalid_argument("OracleConfig: half_width must exceed 1");
        if (n_points < 64) throw std::invalid_argument("OracleConfig: n_points too small");
    }

    /// Default box: V(L) >= 50 g and g S0(L) >= 16 (wavefunction tail below
    /// e^{-16} at the Dirichlet wall).
    static OracleConfig for_coupling(double g, int n_points = 4000) {
        if (!(g > 0.0)) throw std::invalid_argument("OracleConfig: coupling must be positive");
        double L = std::sqrt(1.0 + 10.0 / std::sqrt(g));
        double lo = 1.0, hi = 2.0;
        while (g * s0(hi) < 16.0) hi *= 2.0;
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            (g * s0(mid) < 16.0 ? lo : hi) = mid;
        }
        return OracleConfig(std::max(L, hi), n_points);
    }
};

namespace detail {

/// Number of eigenvalues of the symmetric tridiagonal (d, e) below lambda
/// (Sturm sequence count).
inline int sturm_count(const std::vector<double>& d, const std::vector<double>& e, double lambda) {
    const double tiny = 1e-300;
    int count = 0;
    double q = d[0] - lambda;
    if (q < 0.0) ++count;
    for (std::size_t i = 1; i < d.size(); ++i) {
        if (q == 0.0) q = tiny;
        q = d[i] - lambda - e[i - 1] * e[i - 1] / q;
        if (q < 0.0) ++count;
    }
    return count;
}

/// Lowest eigenvalue of the even-parity discretization of
/// H = -1/2 d^2/dx^2 + V on [0, L]: Neumann at 0 (psi'(0) = 0, handled by a
/// symmetrized half-weight first row), Dirichlet at L. Second-order central
/// differences; bisection on the Sturm count.
inline double lowest_even_eigenvalue(double g, double L, int n) {
    const double h = L / n;
    const double inv_h2 = 1.0 / (h * h);
    std::vector<double> d(n), e(n - 1);
    for (int i = 0; i < n; ++i) d[i] = inv_h2 + potential(i * h, g);
    for (int i = 0; i < n - 1; ++i) e[i] = -0.5 * inv_h2;
    e[0] = -inv_h2 / std::sqrt(2.0);  // similarity-transformed even-parity coupling

    // Gershgorin bracket
    double lo = d[0], hi = d[0];
    for (int i = 0; i < n; ++i) {
        const double r = (i > 0 ? std::abs(e[i - 1]) : 0.0) + (i + 1 < n ? std::abs(e[i]) : 0.0);
        lo = std::min(lo, d[i] - r);
        hi = std::max(hi, d[i] + r);
    }
    const double scale = std::max(std::abs(lo), std::abs(hi));
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (sturm_count(d, e, mid) >= 1 ? hi : lo) = mid;
        if (hi - lo <= 1e-14 * scale) break;
    }
    if (hi - lo > 1e-9 * scale)
        throw std::runtime_error("oracle: eigenvalue bisection failed to converge");
    return 0.5 * (lo + hi);
}

}  // namespace detail

/// Ground-state energy from the independent finite-difference discretization,
/// Richardson-extrapolated over the (h, h/2) grid pair to cancel the O(h^2)
/// error.
inline double ground_energy(double g, const OracleConfig& cfg) {
    const double e1 = detail::lowest_even_eigenvalue(g, cfg.half_width, cfg.n_points);
    const double e2 = detail::lowest_even_eigenvalue(g, cfg.half_width, 2 * cfg.n_points);
    return (4.0 * e2 - e1) / 3.0;
}

inline double ground_energy(double g) { return ground_energy(g, OracleConfig::for_coupling(g)); }

}  // namespace dwell
