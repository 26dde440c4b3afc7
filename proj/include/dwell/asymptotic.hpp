#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace dwell {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// One row of the coefficient pyramid: beta_l(m) for l = 0..2m-1, kept as
/// exact integers together with its beta^0 / delta-beta split
/// (beta = beta0 + delta entrywise; row 1 is the seed [1, 1]).
struct PyramidRow {
    int m;
    std::vector<BigInt> beta0;
    std::vector<BigInt> delta;
    std::vector<BigInt> beta;
};

class BetaPyramid {
public:
    static BetaPyramid seed() {
        BetaPyramid p;
        p.rows_.push_back(PyramidRow{1, {1, 1}, {0, 0}, {1, 1}});
        return p;
    }

    int max_m() const { return static_cast<int>(rows_.size()); }
    const PyramidRow& row(int m) const {
        if (m < 1 || m > max_m()) throw std::out_of_range("BetaPyramid: row out of range");
        return rows_[m - 1];
    }
    const std::vector<PyramidRow>& rows() const { return rows_; }

    void push_row(PyramidRow r) {
        if (r.m != max_m() + 1) throw std::invalid_argument("BetaPyramid: rows must be contiguous");
        rows_.push_back(std::move(r));
    }

private:
    std::vector<PyramidRow> rows_;
};

/// Grows the pyramid to target_m rows.
///
/// Row m+1 (indices L = 0..2m+1):
///   beta0_L = sum_{l=max(0,L-2)}^{2m-1} beta_l(m) (l+4)
///   delta_L = sum_{l=max(1,L-2)}^{2m-1} conv_l,
///     conv_l = sum_{n=1}^{m-1} sum 2 beta_i(n) beta_{l-i-1}(m-n)
/// The inner l-sums are shared across L, so each row costs one convolution
/// plus suffix sums.
inline BetaPyramid extend_pyramid(BetaPyramid p, int target_m) {
    while (p.max_m() < target_m) {
        const int m = p.max_m();
        const auto& prev = p.row(m).beta;  // l = 0..2m-1
        const int len_prev = 2 * m;

        // conv[l], l = 1..2m-1 (index 0 unused)
        std::vector<BigInt> conv(len_prev, 0);
        for (int n = 1; n <= m - 1; ++n) {
            const auto& a = p.row(n).beta;
            const auto& b = p.row(m - n).beta;
            for (std::size_t i = 0; i < a.size(); ++i)
                for (std::size_t j = 0; j < b.size(); ++j)
                    conv[i + j + 1] += 2 * a[i] * b[j];
        }

        // suffix sums: s0[l] = sum_{l'>=l} beta_{l'}(m)(l'+4); sc[l] = sum_{l'>=l} conv[l']
        std::vector<BigInt> s0(len_prev + 1, 0), sc(len_prev + 1, 0);
        for (int l = len_prev - 1; l >= 0; --l) {
            s0[l] = s0[l + 1] + prev[l] * (l + 4);
            sc[l] = sc[l + 1] + (l >= 1 ? conv[l] : BigInt(0));
        }

        PyramidRow next;
        next.m = m + 1;
        const int len_next = 2 * (m + 1);
        next.beta0.resize(len_next);
        next.delta.resize(len_next);
        next.beta.resize(len_next);
        for (int L = 0; L < len_next; ++L) {
            next.beta0[L] = s0[std::min(std::max(0, L - 2), len_prev)];
            next.delta[L] = sc[std::min(std::max(1, L - 2), len_prev)];
            next.beta[L] = next.beta0[L] + next.delta[L];
        }
        p.push_row(std::move(next));
    }
    return p;
}

/// epsilon_1 = 1/4; epsilon_m = beta_0(m) / 2^{4(m-1)+2} for m >= 2.
inline BigRational epsilon(const BetaPyramid& p, int m) {
    if (m < 1) throw std::out_of_range("epsilon: m must be >= 1");
    if (m == 1) return BigRational(1, 4);
    return BigRational(p.row(m).beta[0], BigInt(1) << (4 * (m - 1) + 2));
}

/// The expansion coefficients as exact dyadic rationals plus their double
/// projections, ready for partial-sum evaluation.
struct EpsilonSeries {
    std::vector<BigRational> exact;  // exact[m-1] = epsilon_m
    std::vector<double> value;

    static EpsilonSeries from_pyramid(const BetaPyramid& p) {
        EpsilonSeries s;
        s.exact.reserve(p.max_m());
        for (int m = 1; m <= p.max_m(); ++m) s.exact.push_back(epsilon(p, m));
        s.value.reserve(s.exact.size());
        for (const auto& e : s.exact) s.value.push_back(e.convert_to<double>());
        return s;
    }

    int terms() const { return static_cast<int>(exact.size()); }
};

/// calE_+^N = sum_{m=0}^{N} epsilon_{m+1} / g^m.
inline double partial_sum(const EpsilonSeries& eps, double g, int n) {
    if (n < 0 || n >= eps.terms())
        throw std::out_of_range("partial_sum: series has too few terms");
    double s = 0.0, p = 1.0;
    for (int m = 0; m <= n; ++m) {
        s += eps.value[m] * p;
        p /= g;
    }
    return s;
}

/// Optimal-truncation window: the maximal run of N with
/// |calE_+^N - calE_+^{N-1}| < delta, its minimizing N and the value there.
/// Divergent-series signature: beyond n_max the increments grow again.
struct PlateauReport {
    bool found = false;
    int n_min = 0;
    int n_max = 0;
    int n_best = 0;      // N inside the window with the smallest increment
    double value = 0.0;  // calE_+^{n_best}
    double delta = 0.0;
};

inline PlateauReport plateau(const EpsilonSeries& eps, double g, double delta) {
    const int terms = eps.terms();
    if (terms < 3) throw std::invalid_argument("plateau: series too short");
    std::vector<double> sums(terms);
    double s = 0.0, p = 1.0;
    for (int m = 0; m < terms; ++m) {
        s += eps.value[m] * p;
        p /= g;
        sums[m] = s;
    }
    // diff[N] = |S_N - S_{N-1}| for N = 1..terms-1
    PlateauReport rep;
    rep.delta = delta;
    int run_start = -1;
    auto close_run = [&](int run_end) {
        if (run_start < 0) return;
        if (!rep.found || run_end - run_start > rep.n_max - rep.n_min) {
            rep.found = true;
            rep.n_min = run_start;
            rep.n_max = run_end;
        }
        run_start = -1;
    };
    for (int N = 1; N < terms; ++N) {
        const double d = std::abs(sums[N] - sums[N - 1]);
        if (d < delta) {
            if (run_start < 0) run_start = N;
        } else {
            close_run(N - 1);
        }
    }
    close_run(terms - 1);
    if (rep.found) {
        rep.n_best = rep.n_min;
        double best = std::abs(sums[rep.n_min] - sums[rep.n_min - 1]);
        for (int N = rep.n_min + 1; N <= rep.n_max; ++N) {
            const double d = std::abs(sums[N] - sums[N - 1]);
            if (d < best) {
                best = d;
                rep.n_best = N;
            }
        }
        rep.value = sums[rep.n_best];
    }
    return rep;
}

/// Successive-difference threshold used for the table reproduction: one
/// order-of-magnitude per decimal digit printed per row (4 digits except
/// the g=7,8 rows at 5 and the g=9 row at 6).
inline double table4_delta(double g) {
    auto near = [g](double v) { return std::abs(g - v) < 1e-9; };
    if (near(7.0) || near(8.0)) return 1e-5;
    if (near(9.0)) return 1e-6;
    return 1e-4;
}

/// Polynomial in xi = 2/(1+x) with exact rational coefficients.
/// d/dx maps xi^k -> -(k/2) xi^{k+1}, so differentiation stays polynomial.
struct XiPoly {
    std::vector<BigRational> c;  // c[k] multiplies xi^k

    static double xi_of(double x) { return 2.0 / (1.0 + x); }

    XiPoly d_dx() const {
        XiPoly out;
        out.c.assign(c.size() + 1, BigRational(0));
        for (std::size_t k = 1; k < c.size(); ++k)
            out.c[k + 1] = -c[k] * BigRational(static_cast<int>(k), 2);
        return out;
    }

    XiPoly operator*(const XiPoly& o) const {
        XiPoly out;
        if (c.empty() || o.c.empty()) return out;
        out.c.assign(c.size() + o.c.size() - 1, BigRational(0));
        for (std::size_t i = 0; i < c.size(); ++i)
            for (std::size_t j = 0; j < o.c.size(); ++j)
                out.c[i + j] += c[i] * o.c[j];
        return out;
    }

    XiPoly& operator+=(const XiPoly& o) {
        if (o.c.size() > c.size()) c.resize(o.c.size(), BigRational(0));
        for (std::size_t k = 0; k < o.c.size(); ++k) c[k] += o.c[k];
        return *this;
    }

    XiPoly& operator-=(const XiPoly& o) {
        if (o.c.size() > c.size()) c.resize(o.c.size(), BigRational(0));
        for (std::size_t k = 0; k < o.c.size(); ++k) c[k] -= o.c[k];
        return *this;
    }

    XiPoly scaled(const BigRational& r) const {
        XiPoly out = *this;
        for (auto& v : out.c) v *= r;
        return out;
    }

    double eval_xi(double xi) const {
        double r = 0.0;
        for (std::size_t k = c.size(); k-- > 0;) r = r * xi + c[k].convert_to<double>();
        return r;
    }
    double eval_x(double x) const { return eval_xi(xi_of(x)); }
};

/// T_m(xi) = 2^{-4m} sum_l beta_l(m) xi^l, so that S'_{m+1} = xi^2 T_m.
inline XiPoly t_poly(const BetaPyramid& p, int m) {
    const auto& row = p.row(m).beta;
    XiPoly t;
    t.c.reserve(row.size());
    const BigInt den = BigInt(1) << (4 * m);
    for (const auto& b : row) t.c.push_back(BigRational(b, den));
    return t;
}

/// S'_{m+1} as a xi-polynomial (degree 2m+1).
inline XiPoly s_prime_poly(const BetaPyramid& p, int m) {
    XiPoly xi2;
    xi2.c = {BigRational(0), BigRational(0), BigRational(1)};
    return xi2 * t_poly(p, m);
}

/// tau'_+(x) to the given order: sum_{m=1}^{order} S'_{m+1}(x) / g^m.
inline double s_prime_series(const BetaPyramid& p, double x, int order, double g) {
    if (order < 1 || order > p.max_m())
        throw std::out_of_range("s_prime_series: pyramid too shallow for requested order");
    const double xi = XiPoly::xi_of(x);
    double sum = 0.0, gp = 1.0;
    for (int m = 1; m <= order; ++m) {
        gp /= g;
        // Horner over the row with exact power-of-two scaling
        const auto& row = p.row(m).beta;
        double poly = 0.0;
        for (std::size_t l = row.size(); l-- > 0;)
            poly = poly * xi + std::ldexp(row[l].convert_to<double>(), -4 * m);
        sum += gp * xi * xi * poly;
    }
    return sum;
}

}  // namespace dwell
