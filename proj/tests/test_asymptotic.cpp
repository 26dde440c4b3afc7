#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "dwell/asymptotic.hpp"
#include "dwell/tau_iter.hpp"

using namespace dwell;
using Catch::Approx;

namespace {

/// Independent route to row m+1: the per-entry triple sum with the clamped
/// index bounds, written exactly as displayed, no shared partial sums.
PyramidRow direct_next_row(const BetaPyramid& p, int m) {
    PyramidRow next;
    next.m = m + 1;
    const auto& prev = p.row(m).beta;
    for (int L = 0; L < 2 * (m + 1); ++L) {
        BigInt b0 = 0;
        for (int l = std::max(0, L - 2); l <= 2 * m - 1; ++l) b0 += prev[l] * (l + 4);
        BigInt db = 0;
        for (int l = std::max(1, L - 2); l <= 2 * m - 1; ++l)
            for (int n = 1; n <= m - 1; ++n) {
                const int imin = std::max(0, l - 2 * (m - n));
                const int imax = std::min(2 * n - 1, l - 1);
                for (int i = imin; i <= imax; ++i)
                    db += 2 * p.row(n).beta[i] * p.row(m - n).beta[l - i - 1];
            }
        next.beta0.push_back(b0);
        next.delta.push_back(db);
        next.beta.push_back(b0 + db);
    }
    return next;
}

const BetaPyramid& pyramid45() {
    static const BetaPyramid p = extend_pyramid(BetaPyramid::seed(), 45);
    return p;
}

}  // namespace

TEST_CASE("pyramid rows 1-4 match the printed table exactly") {
    const auto& p = pyramid45();
    auto check_row = [&](int m, std::vector<long> beta0, std::vector<long> delta,
                         std::vector<long> beta) {
        const auto& r = p.row(m);
        REQUIRE(r.beta.size() == static_cast<std::size_t>(2 * m));
        for (std::size_t l = 0; l < beta.size(); ++l) {
            CAPTURE(m, l);
            CHECK(r.beta0[l] == BigInt(beta0[l]));
            CHECK(r.delta[l] == BigInt(delta[l]));
            CHECK(r.beta[l] == BigInt(beta[l]));
            CHECK(r.beta[l] == r.beta0[l] + r.delta[l]);
        }
    };
    check_row(1, {1, 1}, {0, 0}, {1, 1});
    check_row(2, {9, 9, 9, 5}, {0, 0, 0, 0}, {9, 9, 9, 5});
    check_row(3, {170, 170, 170, 134, 89, 35}, {8, 8, 8, 8, 6, 2},
              {178, 178, 178, 142, 95, 37});
    check_row(4, {4757, 4757, 4757, 4045, 3155, 2087, 1093, 333},
              {256, 256, 256, 256, 220, 148, 76, 20},
              {5013, 5013, 5013, 4301, 3375, 2235, 1169, 353});
}

TEST_CASE("convolution route agrees with the direct clamped triple sum") {
    const auto& p = pyramid45();
    for (int m = 1; m <= 8; ++m) {
        const auto direct = direct_next_row(p, m);
        const auto& fast = p.row(m + 1);
        REQUIRE(direct.beta.size() == fast.beta.size());
        for (std::size_t l = 0; l < fast.beta.size(); ++l) {
            CAPTURE(m, l);
            CHECK(fast.beta0[l] == direct.beta0[l]);
            CHECK(fast.delta[l] == direct.delta[l]);
        }
    }
}

TEST_CASE("within a row the leading entries repeat") {
    // the index clamps are inactive for L <= 2, so beta_0 = beta_1 = beta_2
    const auto& p = pyramid45();
    for (int m = 2; m <= 6; ++m) {
        CHECK(p.row(m).beta[0] == p.row(m).beta[1]);
        CHECK(p.row(m).beta[1] == p.row(m).beta[2]);
    }
}

TEST_CASE("epsilon values are the exact dyadic rationals") {
    const auto& p = pyramid45();
    CHECK(epsilon(p, 1) == BigRational(1, 4));
    CHECK(epsilon(p, 2) == BigRational(9, 64));
    CHECK(epsilon(p, 3) == BigRational(89, 512));
    CHECK(epsilon(p, 4) == BigRational(5013, 16384));
    for (int m = 1; m <= 20; ++m) {
        const BigInt den = boost::multiprecision::denominator(epsilon(p, m));
        CAPTURE(m);
        CHECK((den & (den - 1)) == 0);  // power of two
    }
}

TEST_CASE("row-sum identity: the L=0 entry reproduces the closed epsilon sum") {
    // epsilon_{m+1} 2^{4m+2} must equal the full double sum evaluated at
    // xi = 1, i.e. sum_l beta_l(m)(l+4) plus the complete pair convolution.
    const auto& p = pyramid45();
    for (int m = 1; m <= 10; ++m) {
        const auto& prev = p.row(m).beta;
        BigInt total = 0;
        for (int l = 0; l <= 2 * m - 1; ++l) total += prev[l] * (l + 4);
        for (int n = 1; n <= m - 1; ++n)
            for (std::size_t i = 0; i < p.row(n).beta.size(); ++i)
                for (std::size_t j = 0; j < p.row(m - n).beta.size(); ++j)
                    total += 2 * p.row(n).beta[i] * p.row(m - n).beta[j];
        CAPTURE(m);
        CHECK(epsilon(p, m + 1) * (BigInt(1) << (4 * m + 2)) == BigRational(total));
    }
}

TEST_CASE("partial sums") {
    const auto eps = EpsilonSeries::from_pyramid(pyramid45());
    CHECK(partial_sum(eps, 17.3, 0) == 0.25);
    // frozen from the exact rational evaluation
    CHECK(partial_sum(eps, 8.0, 20) == Approx(0.2711460).margin(5e-7));
    CHECK(partial_sum(eps, 6.0, 14) == Approx(0.2807255).margin(5e-7));
    CHECK_THROWS_AS(partial_sum(eps, 8.0, eps.terms()), std::out_of_range);
}

TEST_CASE("plateau analysis") {
    const auto eps = EpsilonSeries::from_pyramid(pyramid45());
    SECTION("no plateau at small coupling") {
        for (double g : {1.0, 3.0, 5.0}) {
            CAPTURE(g);
            CHECK_FALSE(plateau(eps, g, 1e-4).found);
        }
    }
    SECTION("g=8 window and optimal truncation") {
        const auto rep = plateau(eps, 8.0, 1e-5);
        REQUIRE(rep.found);
        CHECK(rep.n_min == 7);
        CHECK(rep.n_max == 35);
        CHECK(rep.n_best == 20);
        CHECK(rep.value == Approx(0.2711460).margin(5e-7));
    }
    SECTION("vanishing corrections at huge coupling") {
        const auto rep = plateau(eps, 1e9, 1e-4);
        REQUIRE(rep.found);
        CHECK(rep.value == Approx(0.25).margin(1e-8));
    }
    SECTION("digit-rule defaults") {
        CHECK(table4_delta(6.0) == 1e-4);
        CHECK(table4_delta(7.0) == 1e-5);
        CHECK(table4_delta(8.0) == 1e-5);
        CHECK(table4_delta(9.0) == 1e-6);
        CHECK(table4_delta(2.0) == 1e-4);
    }
}

TEST_CASE("series terms fall then grow: the divergent-series signature") {
    const auto eps = EpsilonSeries::from_pyramid(pyramid45());
    for (double g : {6.0, 7.0, 8.0, 9.0}) {
        std::vector<double> term;
        double p = 1.0;
        for (int m = 1; m < eps.terms(); ++m) {
            p /= g;
            term.push_back(std::abs(eps.value[m] * p));  // |eps_{m+1}/g^m| = |S_m - S_{m-1}|
        }
        std::size_t argmin = 0;
        for (std::size_t i = 1; i < term.size(); ++i)
            if (term[i] < term[argmin]) argmin = i;
        CAPTURE(g);
        CHECK(argmin > 0);
        CHECK(argmin < term.size() - 1);
        for (std::size_t i = 0; i < term.size() - 1; ++i) {
            if (i < argmin) CHECK(term[i] > term[i + 1]);
            else CHECK(term[i] < term[i + 1]);
        }
    }
}

TEST_CASE("s_prime_series leading orders against the expansion equations") {
    const auto& p = pyramid45();
    const double g = 100.0;  // isolate the 1/g term
    SECTION("value at x=0 from the first expansion equation") {
        // S0' S2' = -(u - eps_1), so S2'(0) = -(u(0) - 1/4)/S0'(0)
        const double expected = -(1.0 - 0.25) / (0.0 - 1.0);
        CHECK(s_prime_series(p, 0.0, 1, g) * g == Approx(expected).epsilon(1e-12));
    }
    SECTION("value at x=1 via the regularized limit") {
        // S0' vanishes at x=1; l'Hopital gives S2'(1) = -u'(1)/S0''(1)
        const double expected = (2.0 / 8.0) / 2.0;
        CHECK(s_prime_series(p, 1.0, 1, g) * g == Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("series approximates the converged tau' at large coupling") {
    // The iteration pins tau'_+(0) = 0 (its forward cumulative starts empty),
    // while the expansion gives tau'_+(0) ~ 0.129 at g=8: the two solutions
    // differ by a boundary layer ~ phi^{-2}(x)/phi^{-2}(0) that has decayed
    // below 1e-4 by x = 0.5, where the O(1/g^2) agreement is clean.
    const double g = 8.0, x = 0.5;
    ModelParams mp(g, TrialState::Plus);
    Grid grid = build_grid(mp, 96);
    const auto tr = solve(mp, grid, 10, 1e-13);
    CHECK(tr.final_correction.values().front() == 0.0);
    const double tau_x = tr.final_correction(x);
    const auto& p = pyramid45();
    const double order1 = s_prime_series(p, x, 1, g);
    const double order2 = s_prime_series(p, x, 2, g);
    // the order-1 error is governed by the S3' term
    const double s3_at_x = s_prime_series(p, x, 2, 1.0) - s_prime_series(p, x, 1, 1.0);
    CHECK(std::abs(tau_x - order1) < 4.0 * std::abs(s3_at_x) / (g * g));
    CHECK(std::abs(tau_x - order2) < std::abs(tau_x - order1));
}

TEST_CASE("expansion recurrence closes: residual at random points") {
    // g^{-m} relation: S0' S'_{m+2} - (S''_{m+1}/2 - S1' S'_{m+1} + eps_{m+1}
    //                  - sum_n S'_{n+1} S'_{m+1-n} / 2) = 0
    const auto& p = pyramid45();
    std::mt19937 rng(777);
    std::uniform_real_distribution<double> xs(0.0, 5.0);

    // S0' = -4(xi-1)/xi^2; with S'_{m+2} = xi^2 T_{m+1} the product is the
    // polynomial -4(xi-1) T_{m+1}.
    for (int m = 1; m <= 6; ++m) {
        XiPoly lhs;
        lhs.c = {BigRational(4), BigRational(-4)};  // -4(xi - 1)
        lhs = lhs * t_poly(p, m + 1);

        XiPoly rhs = s_prime_poly(p, m).d_dx().scaled(BigRational(1, 2));
        XiPoly s1s;  // S1' S'_{m+1} with S1' = xi/2
        s1s.c = {BigRational(0), BigRational(1, 2)};
        rhs -= s1s * s_prime_poly(p, m);
        XiPoly cst;
        cst.c = {epsilon(p, m + 1)};
        rhs += cst;
        for (int n = 1; n <= m - 1; ++n)
            rhs -= (s_prime_poly(p, n) * s_prime_poly(p, m - n)).scaled(BigRational(1, 2));

        for (int trial = 0; trial < 20; ++trial) {
            const double x = xs(rng);
            CAPTURE(m, x);
            CHECK(std::abs(lhs.eval_x(x) - rhs.eval_x(x)) < 1e-10);
        }
    }
}
