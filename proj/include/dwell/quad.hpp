#pragma once

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "dwell/grid.hpp"
#include "dwell/model.hpp"

namespace dwell {

/// Domain truncation: x_max solves 2 g S0(x) = 70 + 2 g S0(0), so the
/// neglected tail weight is below e^{-70} relative to the weight at x=0.
inline double truncation_x_max(double g) {
    const double target = (70.0 + 2.0 * g * s0(0.0)) / (2.0 * g);
    double lo = 1.0, hi = 2.0;
    while (s0(hi) < target) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (s0(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Builds the composite quadrature grid for the given coupling.
///
/// Panel boundaries cluster cosine-style on [0,1] (w_ev varies fastest near
/// 0 and 1), quadratically toward x=1 on [1,2], and stretch geometrically
/// beyond x=2; x=1 is always an exact boundary so the w_ev jump never sits
/// inside a panel.
inline Grid build_grid(const ModelParams& p, int n_panels, int order = 12) {
    if (n_panels < 16)
        throw std::invalid_argument("build_grid: need at least 16 panels");
    const double xmax = truncation_x_max(p.g);
    std::vector<double> b;
    b.reserve(n_panels + 1);

    const int n1 = std::max(8, (4 * n_panels) / 10);
    const bool has_far = xmax > 2.0;
    const int n2 = has_far ? std::max(4, (3 * n_panels) / 10) : n_panels - n1;
    const int n3 = n_panels - n1 - (has_far ? n2 : 0);

    for (int i = 0; i < n1; ++i)
        b.push_back(0.5 * (1.0 - std::cos(M_PI * i / n1)));
    b.push_back(1.0);
    const double mid_end = has_far ? 2.0 : xmax;
    for (int i = 1; i < n2; ++i) {
        const double t = static_cast<double>(i) / n2;
        b.push_back(1.0 + (mid_end - 1.0) * t * t);
    }
    b.push_back(mid_end);
    if (has_far) {
        const double rho = std::pow(xmax / 2.0, 1.0 / n3);
        double x = 2.0;
        for (int i = 1; i < n3; ++i) {
            x *= rho;
            b.push_back(x);
        }
        b.push_back(xmax);
    }
    return Grid(std::move(b), order);
}

/// Log-weighted quadrature context for one (trial state, grid) pair.
///
/// Caches L(x) = log phi^2 at every node and works with ratios
/// exp(L - Lref), Lref = max L, so results are independent of the trial
/// function's normalization and no intermediate under/overflows.
/// Immutable after construction; the sweep counter is atomic so concurrent
/// reads stay safe.
class TrialWeight {
public:
    TrialWeight(const ModelParams& p, const Grid& grid) : grid_(&grid) {
        log_w_.resize(grid.node_count());
        for (std::size_t i = 0; i < log_w_.size(); ++i)
            log_w_[i] = trial_eval(p, grid.nodes()[i]).log_phi_sq;
        finish_init();
    }

    /// Test hook: arbitrary log-weight samples on the grid nodes.
    TrialWeight(const Grid& grid, std::vector<double> log_phi_sq_nodes)
        : grid_(&grid), log_w_(std::move(log_phi_sq_nodes)) {
        if (log_w_.size() != grid.node_count())
            throw std::invalid_argument("TrialWeight: log weight count mismatch");
        finish_init();
    }

    const Grid& grid() const { return *grid_; }
    double log_ref() const { return log_ref_; }
    std::span<const double> log_weight() const { return log_w_; }
    /// exp(L(x_i) - Lref)
    double ratio(std::size_t node) const { return ratio_[node]; }
    /// exp(Lref - L(x_i)), the inverse ratio used to undo the weighting
    double inverse_ratio(std::size_t node) const { return inv_ratio_[node]; }

    std::size_t sweeps() const { return sweeps_.load(std::memory_order_relaxed); }

    /// Weighted mean  int phi^2 f / int phi^2  of node-sampled values.
    double mean(std::span<const double> f_nodes) const {
        if (f_nodes.size() != grid_->node_count())
            throw std::invalid_argument("TrialWeight::mean: value count mismatch");
        std::vector<double> num(f_nodes.size());
        for (std::size_t i = 0; i < num.size(); ++i) num[i] = ratio_[i] * f_nodes[i];
        return grid_->integrate(num) / norm_;
    }

    double mean(const std::function<double(double)>& f) const {
        std::vector<double> v(grid_->node_count());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid_->nodes()[i]);
        return mean(v);
    }

    /// One cumulative sweep: fwd[i] = int_0^{x_i} e^{L-Lref} F,
    /// bwd[i] = int_{x_i}^{x_max} e^{L-Lref} F, at every node.
    void weighted_cumulative(std::span<const double> f_nodes,
                             std::vector<double>* fwd, std::vector<double>* bwd) const {
        std::vector<double> v(f_nodes.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = ratio_[i] * f_nodes[i];
        grid_->cumulative(v, fwd, bwd);
        sweeps_.fetch_add(1, std::memory_order_relaxed);
    }

    /// Plain (unit-weight) cumulative sweep of node-sampled values.
    void plain_cumulative(std::span<const double> v,
                          std::vector<double>* fwd, std::vector<double>* bwd) const {
        grid_->cumulative(v, fwd, bwd);
        sweeps_.fetch_add(1, std::memory_order_relaxed);
    }

private:
    void finish_init() {
        log_ref_ = log_w_[0];
        for (double lv : log_w_) log_ref_ = std::max(log_ref_, lv);
        ratio_.resize(log_w_.size());
        inv_ratio_.resize(log_w_.size());
        for (std::size_t i = 0; i < log_w_.size(); ++i) {
            ratio_[i] = std::exp(log_w_[i] - log_ref_);
            inv_ratio_[i] = std::exp(log_ref_ - log_w_[i]);
        }
        norm_ = grid_->integrate(ratio_);
    }

    const Grid* grid_;
    std::vector<double> log_w_;
    std::vector<double> ratio_, inv_ratio_;
    double log_ref_ = 0.0;
    double norm_ = 0.0;
    mutable std::atomic<std::size_t> sweeps_{0};
};

/// int_0^inf phi^2 f dx / int_0^inf phi^2 dx.
inline double weighted_mean(const std::function<double(double)>& f,
                            const ModelParams& p, const Grid& grid) {
    return TrialWeight(p, grid).mean(f);
}

inline double weighted_mean(const SampledFunction& f,
                            const ModelParams& p, const Grid& grid) {
    if (!f.on(grid))
        throw std::invalid_argument("weighted_mean: sample lives on a different grid");
    return TrialWeight(p, grid).mean(f.values());
}

/// phi^{-2}(x) int_x^inf phi^2(y) f(y) dy, evaluated with the ratio
/// exp(L(y) - L(x)); for x past the weight's maximum the ratio is <= 1.
inline double tail_ratio_integral(const std::function<double(double)>& f, double x,
                                  const ModelParams& p, const Grid& grid) {
    if (x < 0.0 || x > grid.x_max())
        throw std::invalid_argument("tail_ratio_integral: x outside the grid");
    const double log_at_x = trial_eval(p, x).log_phi_sq;
    const GaussLegendre& rule = grid.rule();
    const auto bounds = grid.boundaries();
    const std::size_t kx = grid.panel_of(x);
    auto weighted = [&](double y) {
        return std::exp(trial_eval(p, y).log_phi_sq - log_at_x) * f(y);
    };
    // partial panel [x, b_{kx+1}] with a fresh mapped rule
    double total = 0.0;
    {
        const double a = x, bnd = bounds[kx + 1];
        const double mid = 0.5 * (a + bnd), hl = 0.5 * (bnd - a);
        for (int j = 0; j < rule.order(); ++j)
            total += hl * rule.weights()[j] * weighted(mid + hl * rule.nodes()[j]);
    }
    for (std::size_t k = kx + 1; k < grid.panels(); ++k) {
        const double mid = 0.5 * (bounds[k] + bounds[k + 1]);
        const double hl = 0.5 * (bounds[k + 1] - bounds[k]);
        for (int j = 0; j < rule.order(); ++j)
            total += hl * rule.weights()[j] * weighted(mid + hl * rule.nodes()[j]);
    }
    return total;
}

inline double tail_ratio_integral(const SampledFunction& f, double x,
                                  const ModelParams& p, const Grid& grid) {
    return tail_ratio_integral([&f](double y) { return f(y); }, x, p, grid);
}

}  // namespace dwell
