#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dwell/grid.hpp"

namespace dwell {

/// Which trial state the solvers work with: the lowest even state (phi_ev)
/// or the auxiliary "+" state built from phi_plus alone.
enum class TrialState { Even, Plus };

struct ModelParams {
    double g;
    TrialState state;

    ModelParams(double coupling, TrialState s) : g(coupling), state(s) {
        if (!(g > 0.0) || !std::isfinite(g))
            throw std::invalid_argument("ModelParams: coupling g must be positive");
    }
};

/// Double-well potential, (1/2) g^2 (x^2-1)^2.
inline double potential(double x, double g) {
    const double q = x * x - 1.0;
    return 0.5 * g * g * q * q;
}

/// S0(x) = (x-1)^2 (x+2) / 3 for x >= 0; S0'(x) = x^2 - 1.
inline double s0(double x) {
    const double d = x - 1.0;
    return d * d * (x + 2.0) / 3.0;
}

/// u(x) = 1/(1+x)^2, the perturbation potential of the "+" state.
inline double u(double x) {
    const double s = 1.0 + x;
    return 1.0 / (s * s);
}

/// ghat_ev of the even trial state: nonzero on [0,1), zero for x >= 1.
/// Evaluated through E = exp(2 g S0(x) - 4g/3), which lies in (0,1] on [0,1],
/// so the expression never overflows and has no cancelling difference.
inline double g_hat_ev(double x, double g) {
    if (x >= 1.0) return 0.0;
    const double E = std::exp(2.0 * g * s0(x) - 4.0 * g / 3.0);
    return 2.0 * g * (g - 1.0) * E / ((g + 1.0) + (g - 1.0) * E);
}

/// Perturbation potential of the even state, u + ghat_ev.
/// Discontinuous at x=1 (right-continuous here); the jump equals ghat_ev(1-).
inline double w_ev(double x, double g) { return u(x) + g_hat_ev(x, g); }

/// Magnitude of the w_ev jump at x=1, i.e. ghat_ev(1-).
inline double w_ev_jump(double g) {
    const double E = std::exp(-4.0 * g / 3.0);
    return 2.0 * g * (g - 1.0) * E / ((g + 1.0) + (g - 1.0) * E);
}

/// A trial-function evaluation: log phi^2 (kept alongside phi so quadrature
/// weight ratios can be formed without under/overflow), phi itself, and the
/// matching perturbation potential at x.
struct TrialEval {
    double log_phi_sq;
    double phi;
    double w;
};

/// phi_plus(x) = exp(-g S0(x)) * 2/(1+x), for x >= 0.
inline TrialEval phi_plus(double x, double g) {
    const double ls = -2.0 * g * s0(x) + 2.0 * std::log(2.0 / (1.0 + x));
    return {ls, std::exp(0.5 * ls), u(x)};
}

/// Even trial function: phi_plus + ((g-1)/(g+1)) phi_minus on [0,1),
/// (1 + ((g-1)/(g+1)) e^{-4g/3}) phi_plus beyond. Both branches are formed
/// as phi_plus times (1 + c E) with the bounded exponent E <= 1, and reduce
/// bit-for-bit to phi_plus when g = 1 (the mixing coefficient is exactly 0).
inline TrialEval phi_ev(double x, double g) {
    const TrialEval base = phi_plus(x, g);
    const double c = (g - 1.0) / (g + 1.0);
    const double expo = (x < 1.0) ? 2.0 * g * s0(x) - 4.0 * g / 3.0 : -4.0 * g / 3.0;
    const double E = std::exp(expo);
    return {base.log_phi_sq + 2.0 * std::log1p(c * E),
            base.phi * (1.0 + c * E),
            w_ev(x, g)};
}

inline TrialEval trial_eval(const ModelParams& p, double x) {
    return p.state == TrialState::Even ? phi_ev(x, p.g) : phi_plus(x, p.g);
}

inline double perturbation(const ModelParams& p, double x) {
    return p.state == TrialState::Even ? w_ev(x, p.g) : u(x);
}

/// Checks of the convergence hypotheses on the perturbed potential w:
/// positivity, monotone decrease on each smooth piece (the x=1 jump of w_ev
/// separates the pieces), and decay at the last grid node. Violations are
/// reported, never thrown.
struct ConditionReport {
    bool positive = true;
    bool monotone = true;
    bool decays = true;

    double min_value = std::numeric_limits<double>::infinity();
    double min_x = 0.0;
    double first_positivity_violation_x = std::numeric_limits<double>::quiet_NaN();
    double first_monotonicity_violation_x = std::numeric_limits<double>::quiet_NaN();
    double tail_value = 0.0;
    double decay_threshold = 0.0;
    double jump_at_one = 0.0;

    bool all_pass() const { return positive && monotone && decays; }
};

inline ConditionReport check_trial_conditions(const ModelParams& p, const Grid& grid,
                                              double decay_threshold = 0.2) {
    ConditionReport rep;
    rep.decay_threshold = decay_threshold;
    rep.jump_at_one = (p.state == TrialState::Even) ? w_ev_jump(p.g) : 0.0;
    const auto xs = grid.nodes();
    double prev_w = 0.0;
    bool have_prev = false;
    bool prev_left_of_one = true;
    for (double x : xs) {
        const double w = perturbation(p, x);
        if (w < rep.min_value) {
            rep.min_value = w;
            rep.min_x = x;
        }
        if (w <= 0.0 && rep.positive) {
            rep.positive = false;
            rep.first_positivity_violation_x = x;
        }
        const bool left = x < 1.0;
        // skip the node pair straddling the jump
        if (have_prev && left == prev_left_of_one) {
            const double slack = 1e-12 * (1.0 + std::abs(prev_w));
            if (w > prev_w + slack && rep.monotone) {
                rep.monotone = false;
                rep.first_monotonicity_violation_x = x;
            }
        }
        prev_w = w;
        prev_left_of_one = left;
        have_prev = true;
    }
    rep.tail_value = perturbation(p, xs.back());
    rep.decays = std::abs(rep.tail_value) < decay_threshold;
    return rep;
}

}  // namespace dwell
