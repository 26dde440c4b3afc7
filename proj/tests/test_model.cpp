#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "dwell/model.hpp"
#include "dwell/quad.hpp"
#include "support/oracles.hpp"

using namespace dwell;
using Catch::Approx;

TEST_CASE("potential is the symmetric double well") {
    CHECK(potential(1.0, 3.0) == 0.0);
    CHECK(potential(-1.0, 3.0) == 0.0);
    CHECK(potential(0.0, 2.0) == Approx(2.0));
    CHECK(potential(2.0, 1.0) == Approx(4.5));
    CHECK(potential(0.37, 5.0) == potential(-0.37, 5.0));
    CHECK(potential(1.8, 2.5) >= 0.0);
}

TEST_CASE("s0 values and derivative") {
    CHECK(s0(1.0) == 0.0);
    CHECK(s0(0.0) == Approx(2.0 / 3.0));
    CHECK(s0(3.0) == Approx(20.0 / 3.0));

    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> xs(0.0, 5.0);
    const double h = 1e-5;
    for (int i = 0; i < 100; ++i) {
        const double x = xs(rng);
        const double fd = (s0(x + h) - s0(x - h)) / (2.0 * h);
        CHECK(fd == Approx(x * x - 1.0).margin(1e-6));
    }
}

TEST_CASE("u values") {
    CHECK(u(0.0) == 1.0);
    CHECK(u(1.0) == 0.25);
    CHECK(u(3.0) == Approx(1.0 / 16.0));
}

TEST_CASE("ModelParams rejects non-positive coupling") {
    CHECK_THROWS_AS(ModelParams(0.0, TrialState::Even), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams(-2.0, TrialState::Plus), std::invalid_argument);
    CHECK_NOTHROW(ModelParams(0.05, TrialState::Even));
}

TEST_CASE("phi_plus closed-form spot values") {
    CHECK(phi_plus(1.0, 5.0).phi == Approx(1.0));
    CHECK(phi_plus(0.0, 3.0).phi == Approx(2.0 * std::exp(-2.0)));
    // log field consistent with phi
    const auto t = phi_plus(0.7, 2.0);
    CHECK(std::exp(0.5 * t.log_phi_sq) == Approx(t.phi));
    CHECK(t.w == Approx(u(0.7)));
}

TEST_CASE("phi_plus satisfies its eigenvalue equation") {
    // second-difference Laplacian residual of (T + V + u - g) phi_plus
    for (double g : {1.0, 2.0, 3.0, 8.0}) {
        ModelParams p(g, TrialState::Plus);
        for (double x : {0.05, 0.3, 0.7, 1.0, 1.4, 2.2}) {
            CAPTURE(g, x);
            CHECK(std::abs(testsupport::ode_residual(p, x)) < 1e-6);
        }
    }
}

TEST_CASE("phi_ev equals phi_plus exactly at g=1") {
    for (double x : {0.0, 0.2, 0.9999, 1.0, 1.0001, 2.5, 4.0}) {
        const auto a = phi_ev(x, 1.0);
        const auto b = phi_plus(x, 1.0);
        CHECK(a.phi == b.phi);
        CHECK(a.log_phi_sq == b.log_phi_sq);
        CHECK(a.w == b.w);
    }
}

TEST_CASE("phi_ev branches agree at x=1") {
    const double g = 3.0;
    const double expected = 1.0 + 0.5 * std::exp(-4.0);  // (g-1)/(g+1) = 1/2
    CHECK(phi_ev(1.0, g).phi == Approx(expected).epsilon(1e-14));
    // left and right limits
    CHECK(phi_ev(1.0 - 1e-10, g).phi == Approx(expected).epsilon(1e-8));
    CHECK(phi_ev(1.0 + 1e-10, g).phi == Approx(expected).epsilon(1e-8));
}

TEST_CASE("phi_ev and its derivative are continuous at x=1") {
    const double g = 2.0, h = 1e-4;
    // one-sided O(h^2) slopes on each side of the matching point
    auto phi = [g](double x) { return phi_ev(x, g).phi; };
    const double left = (3.0 * phi(1.0) - 4.0 * phi(1.0 - h) + phi(1.0 - 2.0 * h)) / (2.0 * h);
    const double right = (-3.0 * phi(1.0) + 4.0 * phi(1.0 + h) - phi(1.0 + 2.0 * h)) / (2.0 * h);
    CHECK(left == Approx(right).margin(1e-6));
}

TEST_CASE("phi_ev satisfies its eigenvalue equation on both sides of the jump") {
    for (double g : {1.0, 3.0, 8.0}) {
        ModelParams p(g, TrialState::Even);
        for (double x : {0.05, 0.3, 0.6, 0.95, 1.05, 1.5, 2.2}) {
            CAPTURE(g, x);
            CHECK(std::abs(testsupport::ode_residual(p, x)) < 1e-6);
        }
    }
}

TEST_CASE("w_ev spot values") {
    for (double g : {0.5, 2.0, 7.0}) CHECK(w_ev(0.0, g) == Approx(g).epsilon(1e-13));
    for (double x : {1.5, 2.0, 10.0}) CHECK(w_ev(x, 4.0) == u(x));
    // (g-1) kills ghat at g=1, so the left limit is u(1) = 1/4
    CHECK(w_ev(1.0 - 1e-12, 1.0) == Approx(0.25).epsilon(1e-9));
    CHECK(w_ev_jump(1.0) == 0.0);
    CHECK(w_ev_jump(3.0) > 0.0);
}

TEST_CASE("trial functions positive with finite log on the working grid") {
    for (double g : {0.05, 1.0, 8.0}) {
        for (TrialState st : {TrialState::Even, TrialState::Plus}) {
            ModelParams p(g, st);
            Grid grid = build_grid(p, 64);
            for (double x : grid.nodes()) {
                const auto t = trial_eval(p, x);
                REQUIRE(t.phi > 0.0);
                REQUIRE(std::isfinite(t.log_phi_sq));
            }
        }
    }
}

TEST_CASE("check_trial_conditions: even state") {
    SECTION("g=2 passes all three conditions") {
        ModelParams p(2.0, TrialState::Even);
        const auto rep = check_trial_conditions(p, build_grid(p, 128));
        CHECK(rep.positive);
        CHECK(rep.monotone);
        CHECK(rep.decays);
        CHECK(rep.all_pass());
        CHECK(rep.jump_at_one == Approx(w_ev_jump(2.0)));
    }
    SECTION("g=0.2 loses positivity") {
        ModelParams p(0.2, TrialState::Even);
        const auto rep = check_trial_conditions(p, build_grid(p, 128));
        CHECK_FALSE(rep.positive);
        CHECK(rep.min_value < 0.0);
        CHECK(std::isfinite(rep.first_positivity_violation_x));
        CHECK_FALSE(rep.all_pass());
    }
}

TEST_CASE("check_trial_conditions: u passes for any coupling") {
    for (double g : {0.1, 1.0, 8.0, 40.0}) {
        ModelParams p(g, TrialState::Plus);
        const auto rep = check_trial_conditions(p, build_grid(p, 128));
        CAPTURE(g);
        CHECK(rep.all_pass());
        CHECK(rep.jump_at_one == 0.0);
    }
}
