#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "dwell/tau_iter.hpp"

namespace dwell {

/// State of the original iteration: the multiplicative correction f and the
/// energy that produced it. f > 0 is NOT guaranteed at small coupling; its
/// sign is monitored, not enforced.
struct FState {
    SampledFunction f;
    double energy;
};

/// calE_n = int phi^2 f w / int phi^2 f. Valid only while the denominator
/// stays positive; a non-positive denominator is the breakdown signal, so it
/// is returned, not thrown.
struct FEnergy {
    double value;
    double denominator;
    bool valid() const { return denominator > 0.0; }
};

namespace detail {

inline FEnergy f_energy_impl(const TrialWeight& wt, std::span<const double> w_nodes,
                             std::span<const double> f_nodes) {
    const Grid& grid = wt.grid();
    std::vector<double> num(grid.node_count()), den(grid.node_count());
    for (std::size_t i = 0; i < num.size(); ++i) {
        den[i] = wt.ratio(i) * f_nodes[i];
        num[i] = den[i] * w_nodes[i];
    }
    const double d = grid.integrate(den);
    return {grid.integrate(num) / d, d};
}

struct FUpdate {
    std::vector<double> values;
    bool finite;
    double min_value;
    double min_x;
};

/// f_n(x) = 1 - 2 int_x^inf phi^{-2}(y) dy int_y^inf phi^2(z) (w - calE_n) f_{n-1} dz,
/// as two backward sweeps: the inner one weighted by e^{L-Lref}, the outer one
/// plain over e^{Lref-L(y)} G(y). The exponent never exceeds the truncation
/// budget, so the product stays in range.
inline FUpdate f_update(const TrialWeight& wt, std::span<const double> w_nodes,
                        std::span<const double> f_nodes, double e_n) {
    const Grid& grid = wt.grid();
    const std::size_t n = grid.node_count();
    std::vector<double> inner(n);
    for (std::size_t i = 0; i < n; ++i) inner[i] = (w_nodes[i] - e_n) * f_nodes[i];
    std::vector<double> inner_bwd;
    wt.weighted_cumulative(inner, nullptr, &inner_bwd);

    std::vector<double> outer(n);
    for (std::size_t i = 0; i < n; ++i) outer[i] = wt.inverse_ratio(i) * inner_bwd[i];
    std::vector<double> outer_bwd;
    wt.plain_cumulative(outer, nullptr, &outer_bwd);

    FUpdate up{std::vector<double>(n), true, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        up.values[i] = 1.0 - 2.0 * outer_bwd[i];
        if (!std::isfinite(up.values[i])) up.finite = false;
    }
    if (up.finite) {
        std::size_t arg = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (up.values[i] < up.values[arg]) arg = i;
        up.min_value = up.values[arg];
        up.min_x = grid.nodes()[arg];
    }
    return up;
}

}  // namespace detail

inline FEnergy f_energy(const SampledFunction& prev_f, const ModelParams& p, const Grid& grid) {
    if (!prev_f.on(grid))
        throw std::invalid_argument("f_energy: sample lives on a different grid");
    TrialWeight wt(p, grid);
    return detail::f_energy_impl(wt, detail::perturbation_values(p, grid), prev_f.values());
}

struct FStepResult {
    FState state;
    std::optional<InstabilityReport> instability;
};

/// One f step: energy from prev.f, then the double-cumulative update.
inline FStepResult f_step(const FState& prev, const ModelParams& p, const Grid& grid) {
    if (!prev.f.on(grid))
        throw std::invalid_argument("f_step: sample lives on a different grid");
    TrialWeight wt(p, grid);
    const auto w = detail::perturbation_values(p, grid);
    const FEnergy e = detail::f_energy_impl(wt, w, prev.f.values());
    if (!e.valid()) {
        return {FState{prev.f, e.value},
                InstabilityReport{InstabilityReport::Kind::NonPositiveDenominator, 0, e.denominator,
                                  0.0, "energy denominator lost positivity"}};
    }
    auto up = detail::f_update(wt, w, prev.f.values(), e.value);
    if (!up.finite) {
        return {FState{prev.f, e.value},
                InstabilityReport{InstabilityReport::Kind::Overflow, 0, e.value, 0.0,
                                  "outer cumulative overflowed"}};
    }
    std::optional<InstabilityReport> rep;
    if (up.min_value < 0.0)
        rep = InstabilityReport{InstabilityReport::Kind::NegativeF, 0, up.min_value, up.min_x,
                                "f went negative"};
    return {FState{SampledFunction(grid, std::move(up.values)), e.value}, rep};
}

/// Runs the f-iteration from f_0 = 1. Each step costs two cumulative sweeps.
/// The first breakdown (negative f, lost denominator, divergence, overflow)
/// is recorded in the trace; a negative f is reported but the iteration
/// continues while the denominator allows it.
inline IterationTrace solve_f(const ModelParams& p, const Grid& grid,
                              int n_iters = 5, double tol = 1e-10) {
    if (n_iters < 1) throw std::invalid_argument("solve_f: n_iters must be >= 1");
    TrialWeight wt(p, grid);
    const auto w = detail::perturbation_values(p, grid);

    IterationTrace trace{IterationScheme::F, {}, SampledFunction::constant(grid, 1.0), 0.0};
    std::vector<double> f(grid.node_count(), 1.0);

    auto record_first = [&trace](InstabilityReport rep) {
        if (!trace.instability) trace.instability = std::move(rep);
    };
    for (int n = 1; n <= n_iters; ++n) {
        const FEnergy e = detail::f_energy_impl(wt, w, f);
        if (!e.valid()) {
            record_first(InstabilityReport{InstabilityReport::Kind::NonPositiveDenominator,
                                           n, e.denominator, 0.0,
                                           "energy denominator lost positivity"});
            break;
        }
        trace.energies.push_back(e.value);
        if (energy_diverged(e.value, p.g)) {
            record_first(InstabilityReport{InstabilityReport::Kind::EnergyDivergence, n,
                                           e.value, 0.0, "energy exceeds the divergence guard"});
            break;
        }
        auto up = detail::f_update(wt, w, f, e.value);
        if (!up.finite) {
            record_first(InstabilityReport{InstabilityReport::Kind::Overflow, n, e.value, 0.0,
                                           "outer cumulative overflowed"});
            break;
        }
        if (up.min_value < 0.0)
            record_first(InstabilityReport{InstabilityReport::Kind::NegativeF, n,
                                           up.min_value, up.min_x, "f went negative"});
        f = std::move(up.values);
        if (n > 1 && std::abs(e.value - trace.energies[n - 2]) < tol) {
            trace.converged = true;
            break;
        }
    }
    if (trace.energies.empty()) trace.energies.push_back(std::numeric_limits<double>::quiet_NaN());
    trace.final_correction = SampledFunction(grid, std::move(f));
    trace.e_final = p.g - trace.energies.back();
    trace.cumulative_sweeps = wt.sweeps();
    return trace;
}

}  // namespace dwell
