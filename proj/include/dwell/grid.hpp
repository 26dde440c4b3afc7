#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace dwell {

/// Gauss-Legendre rule on [-1,1] plus partial-range integration weights.
///
/// Besides the usual nodes/weights, the rule carries the matrices
///   back(i,j) = int_{t_i}^{+1} l_j(t) dt,   fwd(i,j) = int_{-1}^{t_i} l_j(t) dt
/// where l_j is the Lagrange basis through the nodes. These make cumulative
/// integrals of a node-sampled integrand exact for polynomials of degree
/// order-1, which is what the iteration solvers need at every grid node.
class GaussLegendre {
public:
    explicit GaussLegendre(int order) : order_(order) {
        if (order < 2 || order > 32)
            throw std::invalid_argument("GaussLegendre: order must be in [2,32]");
        nodes_.resize(order_);
        weights_.resize(order_);
        const int half = (order_ + 1) / 2;
        for (int i = 0; i < half; ++i) {
            // Newton iteration on P_n, starting from the Chebyshev estimate.
            double z = std::cos(M_PI * (i + 0.75) / (order_ + 0.5));
            double z1, pp;
            do {
                double p1 = 1.0, p2 = 0.0;
                for (int j = 0; j < order_; ++j) {
                    const double p3 = p2;
                    p2 = p1;
                    p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
                }
                pp = order_ * (z * p1 - p2) / (z * z - 1.0);
                z1 = z;
                z = z1 - p1 / pp;
            } while (std::abs(z - z1) > 1e-15);
            nodes_[i] = -z;
            nodes_[order_ - 1 - i] = z;
            weights_[i] = 2.0 / ((1.0 - z * z) * pp * pp);
            weights_[order_ - 1 - i] = weights_[i];
        }
        build_partial_weights();
    }

    int order() const { return order_; }
    std::span<const double> nodes() const { return nodes_; }
    std::span<const double> weights() const { return weights_; }

    double back(int i, int j) const { return back_[i * order_ + j]; }
    double fwd(int i, int j) const { return fwd_[i * order_ + j]; }

private:
    void build_partial_weights() {
        // Barycentric weights for the Lagrange basis through the GL nodes.
        std::vector<double> lam(order_, 1.0);
        for (int j = 0; j < order_; ++j) {
            for (int k = 0; k < order_; ++k)
                if (k != j) lam[j] /= (nodes_[j] - nodes_[k]);
        }
        back_.assign(static_cast<std::size_t>(order_) * order_, 0.0);
        fwd_.assign(static_cast<std::size_t>(order_) * order_, 0.0);
        // back(i,j) = int_{t_i}^{1} l_j: integrate the degree order-1 basis
        // exactly with the same rule mapped onto [t_i, 1].
        for (int i = 0; i < order_; ++i) {
            const double a = nodes_[i], b = 1.0;
            const double mid = 0.5 * (a + b), hl = 0.5 * (b - a);
            for (int q = 0; q < order_; ++q) {
                const double s = mid + hl * nodes_[q];
                // l_j(s) via the barycentric formula
                double denom = 0.0;
                int hit = -1;
                for (int k = 0; k < order_; ++k) {
                    const double d = s - nodes_[k];
                    if (std::abs(d) < 1e-14) { hit = k; break; }
                    denom += lam[k] / d;
                }
                for (int j = 0; j < order_; ++j) {
                    const double lj = (hit >= 0) ? (j == hit ? 1.0 : 0.0)
                                                 : (lam[j] / (s - nodes_[j])) / denom;
                    back_[i * order_ + j] += hl * weights_[q] * lj;
                }
            }
            for (int j = 0; j < order_; ++j)
                fwd_[i * order_ + j] = weights_[j] - back_[i * order_ + j];
        }
    }

    int order_;
    std::vector<double> nodes_, weights_;
    std::vector<double> back_, fwd_;
};

/// Composite-panel grid on [0, x_max].
///
/// Nodes are the panel boundaries interleaved with the Gauss-Legendre nodes
/// of each panel, ascending. Only GL nodes carry quadrature weight; the
/// boundary nodes exist so that sampled functions have values at 0, 1 and
/// x_max exactly. Immutable after construction.
class Grid {
public:
    Grid(std::vector<double> panel_boundaries, int order)
        : rule_(order), bounds_(std::move(panel_boundaries)) {
        if (bounds_.size() < 2)
            throw std::invalid_argument("Grid: need at least one panel");
        if (bounds_.front() != 0.0)
            throw std::invalid_argument("Grid: domain must start at x=0");
        for (std::size_t k = 0; k + 1 < bounds_.size(); ++k)
            if (!(bounds_[k] < bounds_[k + 1]))
                throw std::invalid_argument("Grid: panel boundaries must increase");
        const int p = rule_.order();
        nodes_.reserve(panels() * (p + 1) + 1);
        for (std::size_t k = 0; k + 1 < bounds_.size(); ++k) {
            nodes_.push_back(bounds_[k]);
            const double mid = 0.5 * (bounds_[k] + bounds_[k + 1]);
            const double hl = 0.5 * (bounds_[k + 1] - bounds_[k]);
            for (int j = 0; j < p; ++j) nodes_.push_back(mid + hl * rule_.nodes()[j]);
        }
        nodes_.push_back(bounds_.back());
        contains_one_ = std::any_of(bounds_.begin(), bounds_.end(),
                                    [](double b) { return b == 1.0; });
    }

    std::size_t panels() const { return bounds_.size() - 1; }
    int order() const { return rule_.order(); }
    std::span<const double> nodes() const { return nodes_; }
    std::size_t node_count() const { return nodes_.size(); }
    double x_max() const { return bounds_.back(); }
    bool contains_one() const { return contains_one_; }
    std::span<const double> boundaries() const { return bounds_; }
    const GaussLegendre& rule() const { return rule_; }

    std::size_t boundary_node(std::size_t panel) const { return panel * (order() + 1); }
    std::size_t quad_node(std::size_t panel, int j) const { return panel * (order() + 1) + 1 + j; }
    double panel_half_width(std::size_t panel) const {
        return 0.5 * (bounds_[panel + 1] - bounds_[panel]);
    }

    bool same_layout(const Grid& o) const {
        return order() == o.order() && bounds_ == o.bounds_;
    }

    /// Quadrature of node-sampled values over [0, x_max].
    double integrate(std::span<const double> v) const {
        check_size(v);
        const int p = order();
        double total = 0.0;
        for (std::size_t k = 0; k < panels(); ++k) {
            const double hl = panel_half_width(k);
            double s = 0.0;
            for (int j = 0; j < p; ++j) s += rule_.weights()[j] * v[quad_node(k, j)];
            total += hl * s;
        }
        return total;
    }

    double integrate(const std::function<double(double)>& f) const {
        std::vector<double> v(node_count());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(nodes_[i]);
        return integrate(v);
    }

    /// Cumulative integrals of node-sampled values, reported at every node:
    /// fwd[i] = int_0^{x_i} v,  bwd[i] = int_{x_i}^{x_max} v.
    /// The two are accumulated independently (left-to-right prefix sums vs
    /// right-to-left suffix sums), so their consistency is testable.
    void cumulative(std::span<const double> v,
                    std::vector<double>* fwd, std::vector<double>* bwd) const {
        check_size(v);
        const int p = order();
        if (fwd) {
            fwd->assign(node_count(), 0.0);
            double prefix = 0.0;
            for (std::size_t k = 0; k < panels(); ++k) {
                const double hl = panel_half_width(k);
                (*fwd)[boundary_node(k)] = prefix;
                double full = 0.0;
                for (int i = 0; i < p; ++i) {
                    double s = 0.0;
                    for (int j = 0; j < p; ++j) s += rule_.fwd(i, j) * v[quad_node(k, j)];
                    (*fwd)[quad_node(k, i)] = prefix + hl * s;
                    full += rule_.weights()[i] * v[quad_node(k, i)];
                }
                prefix += hl * full;
            }
            (*fwd)[node_count() - 1] = prefix;
        }
        if (bwd) {
            bwd->assign(node_count(), 0.0);
            double suffix = 0.0;
            for (std::size_t kk = panels(); kk-- > 0;) {
                const double hl = panel_half_width(kk);
                (*bwd)[boundary_node(kk + 1)] = suffix;
                double full = 0.0;
                for (int i = 0; i < p; ++i) {
                    double s = 0.0;
                    for (int j = 0; j < p; ++j) s += rule_.back(i, j) * v[quad_node(kk, j)];
                    (*bwd)[quad_node(kk, i)] = suffix + hl * s;
                    full += rule_.weights()[i] * v[quad_node(kk, i)];
                }
                suffix += hl * full;
            }
            (*bwd)[0] = suffix;
        }
    }

    /// Index of the panel containing x (clamped to the domain).
    std::size_t panel_of(double x) const {
        auto it = std::upper_bound(bounds_.begin(), bounds_.end(), x);
        const std::ptrdiff_t k = (it - bounds_.begin()) - 1;
        return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(k, 0, panels() - 1));
    }

private:
    void check_size(std::span<const double> v) const {
        if (v.size() != node_count())
            throw std::invalid_argument("Grid: sampled values do not match node count");
    }

    GaussLegendre rule_;
    std::vector<double> bounds_;
    std::vector<double> nodes_;
    bool contains_one_ = false;
};

/// Values on the nodes of a Grid with piecewise-cubic interpolation between
/// nodes; evaluation outside [0, x_max] clamps to the endpoint values.
class SampledFunction {
public:
    SampledFunction(const Grid& grid, std::vector<double> values)
        : grid_(&grid), values_(std::move(values)) {
        if (values_.size() != grid.node_count())
            throw std::invalid_argument("SampledFunction: value count mismatch");
        for (double v : values_)
            if (!std::isfinite(v))
                throw std::invalid_argument("SampledFunction: non-finite node value");
    }

    static SampledFunction zeros(const Grid& grid) {
        return SampledFunction(grid, std::vector<double>(grid.node_count(), 0.0));
    }
    static SampledFunction constant(const Grid& grid, double c) {
        return SampledFunction(grid, std::vector<double>(grid.node_count(), c));
    }

    const Grid& grid() const { return *grid_; }
    std::span<const double> values() const { return values_; }
    double at_node(std::size_t i) const { return values_[i]; }

    bool on(const Grid& g) const { return grid_ == &g || grid_->same_layout(g); }

    double operator()(double x) const {
        const auto xs = grid_->nodes();
        if (x <= xs.front()) return values_.front();
        if (x >= xs.back()) return values_.back();
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        std::size_t i = static_cast<std::size_t>(it - xs.begin());  // xs[i-1] <= x < xs[i]
        // cubic through the four nodes around the interval
        std::size_t j0 = (i >= 2) ? i - 2 : 0;
        j0 = std::min(j0, xs.size() - 4);
        double r = 0.0;
        for (std::size_t a = 0; a < 4; ++a) {
            double term = values_[j0 + a];
            for (std::size_t b = 0; b < 4; ++b) {
                if (a == b) continue;
                term *= (x - xs[j0 + b]) / (xs[j0 + a] - xs[j0 + b]);
            }
            r += term;
        }
        return r;
    }

private:
    const Grid* grid_;
    std::vector<double> values_;
};

}  // namespace dwell
