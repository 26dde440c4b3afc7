#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "dwell/quad.hpp"

namespace dwell {

enum class IterationScheme { Tau, F };

/// Structured breakdown report: which step failed and why. The f-iteration
/// at small coupling is the expected producer (f going negative, or the
/// energy denominator losing positivity); a generic divergence guard covers
/// both schemes.
struct InstabilityReport {
    enum class Kind { NegativeF, NonPositiveDenominator, EnergyDivergence, Overflow };
    Kind kind;
    int step;        // 1-based iteration step
    double value;    // min f, denominator, or the runaway energy
    double x;        // location, where meaningful
    std::string what;
};

struct IterationTrace {
    IterationScheme scheme;
    std::vector<double> energies;        // calE_n, one per step
    SampledFunction final_correction;    // tau'_n (Tau) or f_n (F)
    double e_final;                      // E = g - calE_last
    bool converged = false;              // hit the tol stop
    std::optional<InstabilityReport> instability;
    std::size_t cumulative_sweeps = 0;

    int steps() const { return static_cast<int>(energies.size()); }
};

inline bool energy_diverged(double e, double g) { return std::abs(e) > 10.0 * (std::abs(g) + 1.0); }

namespace detail {

inline std::vector<double> perturbation_values(const ModelParams& p, const Grid& grid) {
    std::vector<double> w(grid.node_count());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = perturbation(p, grid.nodes()[i]);
    return w;
}

inline std::vector<double> half_square(std::span<const double> v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = 0.5 * v[i] * v[i];
    return out;
}

/// One tau' update (Eqs. for n=1 and n>1 coincide: with prev = 0 and
/// e_n = e_1 the result is tau'_1 itself). Forward cumulative below x=1,
/// backward from x=1 up; the split point is the x=1 panel boundary where
/// both forms agree because the full weighted integral of the update
/// integrand vanishes by construction of e_n.
inline SampledFunction tau_prime_update(const TrialWeight& wt, std::span<const double> w_nodes,
                                        const SampledFunction* prev, double e_n, double e_1) {
    const Grid& grid = wt.grid();
    std::vector<double> integrand(grid.node_count());
    for (std::size_t i = 0; i < integrand.size(); ++i) {
        const double sq = prev ? 0.5 * prev->at_node(i) * prev->at_node(i) : 0.0;
        integrand[i] = (w_nodes[i] - e_1) + (e_1 - e_n) + sq;
    }
    std::vector<double> fwd, bwd;
    wt.weighted_cumulative(integrand, &fwd, &bwd);
    std::vector<double> tau(grid.node_count());
    for (std::size_t i = 0; i < tau.size(); ++i) {
        const double x = grid.nodes()[i];
        tau[i] = (x < 1.0) ? 2.0 * wt.inverse_ratio(i) * fwd[i]
                           : -2.0 * wt.inverse_ratio(i) * bwd[i];
    }
    return SampledFunction(grid, std::move(tau));
}

}  // namespace detail

/// calE_1 = <w>, the first-step energy (both schemes start here).
inline double first_energy(const ModelParams& p, const Grid& grid) {
    TrialWeight wt(p, grid);
    return wt.mean(detail::perturbation_values(p, grid));
}

/// calE_n = calE_1 + <(tau'_{n-1})^2 / 2>.
inline double energy_step(const SampledFunction& prev, const ModelParams& p, const Grid& grid) {
    if (!prev.on(grid))
        throw std::invalid_argument("energy_step: sample lives on a different grid");
    TrialWeight wt(p, grid);
    const double e1 = wt.mean(detail::perturbation_values(p, grid));
    return e1 + wt.mean(detail::half_square(prev.values()));
}

/// tau'_n from tau'_{n-1} and the pair (e_n, e_1); hybrid forward/backward
/// cumulative split at x=1. With prev == zeros and e_n == e_1 this is tau'_1.
inline SampledFunction tau_prime_step(const SampledFunction& prev, double e_n, double e_1,
                                      const ModelParams& p, const Grid& grid) {
    if (!prev.on(grid))
        throw std::invalid_argument("tau_prime_step: sample lives on a different grid");
    TrialWeight wt(p, grid);
    return detail::tau_prime_update(wt, detail::perturbation_values(p, grid), &prev, e_n, e_1);
}

/// Runs the tau-iteration from the zero initial state. Stops at n_iters
/// steps or once |calE_n - calE_{n-1}| < tol; each step costs one weighted
/// cumulative sweep.
inline IterationTrace solve(const ModelParams& p, const Grid& grid,
                            int n_iters = 5, double tol = 1e-10) {
    if (n_iters < 1) throw std::invalid_argument("solve: n_iters must be >= 1");
    TrialWeight wt(p, grid);
    const auto w = detail::perturbation_values(p, grid);

    const double e1 = wt.mean(w);
    IterationTrace trace{IterationScheme::Tau, {e1}, SampledFunction::zeros(grid), 0.0};
    SampledFunction tau = detail::tau_prime_update(wt, w, nullptr, e1, e1);

    if (energy_diverged(e1, p.g)) {
        trace.instability = InstabilityReport{InstabilityReport::Kind::EnergyDivergence, 1, e1, 0.0,
                                              "first-step energy exceeds the divergence guard"};
    } else {
        for (int n = 2; n <= n_iters; ++n) {
            const double en = e1 + wt.mean(detail::half_square(tau.values()));
            trace.energies.push_back(en);
            if (energy_diverged(en, p.g)) {
                trace.instability = InstabilityReport{InstabilityReport::Kind::EnergyDivergence, n,
                                                      en, 0.0, "energy exceeds the divergence guard"};
                break;
            }
            tau = detail::tau_prime_update(wt, w, &tau, en, e1);
            if (std::abs(en - trace.energies[n - 2]) < tol) {
                trace.converged = true;
                break;
            }
        }
    }
    trace.final_correction = std::move(tau);
    trace.e_final = p.g - trace.energies.back();
    trace.cumulative_sweeps = wt.sweeps();
    return trace;
}

}  // namespace dwell
