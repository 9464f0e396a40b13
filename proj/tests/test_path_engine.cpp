#include <doctest.h>

#include <cmath>

#include "sepmp/errors.hpp"
#include "sepmp/state.hpp"
#include "sepmp/summation.hpp"

using namespace sepmp;

namespace {

EventPath no_events(double horizon) {
    EventPath p;
    p.model.lambda0 = 1.0;
    p.horizon = horizon;
    p.lambda_initial = 1.0;
    return p;
}

EventPath one_event(double t, double y, double horizon) {
    EventPath p = no_events(horizon);
    p.times = {t};
    p.marks = {y};
    p.lambda_pre = {1.0};
    p.lambda_post = {1.0};
    return p;
}

StateCoefficients frozen() {
    return StateCoefficients::general(
        [](double, double, double) { return 0.0; },
        [](double, double, double) { return 0.0; },
        [](double, double, double) { return 0.0; });
}

}  // namespace

TEST_CASE("time grid contains every event time exactly once") {
    EventPath p = no_events(1.0);
    p.times = {0.25, 0.3777, 0.9};
    p.marks = {1.0, 1.0, 1.0};
    p.lambda_pre = {1, 1, 1};
    p.lambda_post = {1, 1, 1};
    TimeGrid g = TimeGrid::build(1.0, 4, p);
    CHECK(g.knots.front() == 0.0);
    CHECK(g.knots.back() == 1.0);
    for (std::size_t k = 1; k < g.knots.size(); ++k) {
        CHECK(g.knots[k] > g.knots[k - 1]);
    }
    for (double t : p.times) {
        std::size_t hits = 0;
        for (double knot : g.knots) {
            if (knot == t) ++hits;
        }
        CHECK(hits == 1);
    }
    // 0.25 collides with a uniform knot and must not be duplicated
    CHECK(g.size() == 5 + 2);
}

TEST_CASE("zero dynamics keep the state frozen") {
    EventPath p = one_event(0.4, 2.0, 1.0);
    TimeGrid g = TimeGrid::build(1.0, 8, p);
    PathStreams streams = PathStreams::derive(3, 0);
    StatePath sp = simulate_state(frozen(), ControlPolicy::constant(0.0), p, g, streams, 3.0);
    for (double x : sp.x_post) CHECK(x == 3.0);
}

TEST_CASE("single Euler step by hand") {
    EventPath p = no_events(0.01);
    TimeGrid g = TimeGrid::build(0.01, 1, p);
    auto coeffs = StateCoefficients::general(
        [](double, double, double) { return 2.0; },
        [](double, double, double) { return 0.5; },
        [](double, double, double) { return 0.0; });
    StatePath sp = simulate_state_with_noise(coeffs, ControlPolicy::constant(0.0), p, g,
                                             {0.1}, 1.0);
    CHECK(sp.x_post.back() == doctest::Approx(1.07).epsilon(1e-15));
}

TEST_CASE("deterministic log-linear Euler converges at first order") {
    // vol = 0, kappa = 0, alpha − pi = r: X_T → e^{rT}
    double r = 0.3, T = 1.0;
    auto coeffs = StateCoefficients::log_linear(
        [r](double) { return r; }, [](double) { return 0.0; }, [](double) { return 0.0; });
    EventPath p = no_events(T);
    double prev_err = 0.0;
    for (std::size_t pass = 0; pass < 3; ++pass) {
        std::size_t steps = 50 << pass;
        TimeGrid g = TimeGrid::build(T, steps, p);
        std::vector<double> dB(g.size() - 1, 0.0);
        StatePath sp = simulate_state_with_noise(coeffs, ControlPolicy::constant(0.0), p,
                                                 g, dB, 1.0);
        double err = std::abs(sp.x_post.back() - std::exp(r * T));
        if (pass > 0) {
            CHECK(err < 0.65 * prev_err);  // halving up to higher-order terms
        }
        prev_err = err;
    }
}

TEST_CASE("jump bookkeeping is exact at event knots") {
    auto coeffs = StateCoefficients::log_linear(
        [](double) { return 0.1; }, [](double) { return 0.2; }, [](double) { return 0.3; });
    EventPath p = one_event(0.37, 1.5, 1.0);
    TimeGrid g = TimeGrid::build(1.0, 16, p);
    PathStreams streams = PathStreams::derive(17, 0);
    ControlPolicy pol = ControlPolicy::constant(0.05);
    StatePath sp = simulate_state(coeffs, pol, p, g, streams, 1.0);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.is_event[k]) {
            double jump = sp.x_post[k] - sp.x_pre[k];
            double expected = coeffs.eval_gamma(g.knots[k], sp.x_pre[k],
                                                pol(g.knots[k], sp.x_pre[k])) *
                              p.marks[g.event_index[k]];
            CHECK(jump == doctest::Approx(expected).epsilon(1e-14));
        } else {
            CHECK(sp.x_pre[k] == sp.x_post[k]);
        }
    }
}

TEST_CASE("exact log-linear benchmark: degenerate cases") {
    EventPath p = no_events(2.0);
    TimeGrid g = TimeGrid::build(2.0, 64, p);
    std::vector<double> dB(g.size() - 1, 0.0);

    auto flat = StateCoefficients::log_linear(
        [](double) { return 0.4; }, [](double) { return 0.0; }, [](double) { return 0.0; });
    // alpha == pi: exponent vanishes
    CHECK(exact_loglinear_state(flat, ControlPolicy::constant(0.4), p, g, dB, 2.0, 1.7) ==
          doctest::Approx(1.7).epsilon(1e-14));
    // alpha − pi = r, no noise: plain exponential
    CHECK(exact_loglinear_state(flat, ControlPolicy::constant(0.1), p, g, dB, 2.0, 1.0) ==
          doctest::Approx(std::exp(0.3 * 2.0)).epsilon(1e-12));
}

TEST_CASE("exact log-linear benchmark: single jump term") {
    // exponent contribution κY − ½κ²Y² = 0.4 − 0.08 = 0.32
    EventPath p = one_event(0.5, 2.0, 1.0);
    TimeGrid g = TimeGrid::build(1.0, 32, p);
    std::vector<double> dB(g.size() - 1, 0.0);
    auto coeffs = StateCoefficients::log_linear(
        [](double) { return 0.25; }, [](double) { return 0.0; }, [](double) { return 0.2; });
    double x = exact_loglinear_state(coeffs, ControlPolicy::constant(0.25), p, g, dB, 1.0, 1.0);
    CHECK(x == doctest::Approx(std::exp(0.32)).epsilon(1e-12));
    CHECK(x == doctest::Approx(1.37713).epsilon(1e-5));
}

TEST_CASE("exact benchmark rejects non-log-linear coefficients") {
    EventPath p = no_events(1.0);
    TimeGrid g = TimeGrid::build(1.0, 4, p);
    std::vector<double> dB(g.size() - 1, 0.0);
    CHECK_THROWS_AS(
        exact_loglinear_state(frozen(), ControlPolicy::constant(0.0), p, g, dB, 1.0, 1.0),
        ConfigError);
}

TEST_CASE("log-linear positivity violation raises") {
    // huge negative drift forces x through zero within one step
    auto coeffs = StateCoefficients::log_linear(
        [](double) { return -2000.0; }, [](double) { return 0.0; }, [](double) { return 0.0; });
    EventPath p = no_events(1.0);
    TimeGrid g = TimeGrid::build(1.0, 1, p);
    CHECK_THROWS_AS(simulate_state_with_noise(coeffs, ControlPolicy::constant(0.0), p, g,
                                              {0.0}, 1.0),
                    PositivityViolation);
}

TEST_CASE("strong convergence of Euler to the continuous benchmark") {
    // kappa = 0; RMS error at T shrinks with empirical order >= 0.4
    auto coeffs = StateCoefficients::log_linear(
        [](double) { return 0.1; }, [](double) { return 0.4; }, [](double) { return 0.0; });
    ControlPolicy pol = ControlPolicy::constant(0.05);
    EventPath p = no_events(1.0);
    const std::size_t n_paths = 400;
    std::vector<double> log_err, log_dt;
    for (std::size_t lvl = 0; lvl < 3; ++lvl) {
        std::size_t steps = 32 << lvl;
        TimeGrid g = TimeGrid::build(1.0, steps, p);
        KahanSum sq;
        for (std::size_t i = 0; i < n_paths; ++i) {
            PathStreams streams = PathStreams::derive(1000 + lvl, i);
            StatePath sp = simulate_state(coeffs, pol, p, g, streams, 1.0);
            double ex = exact_loglinear_state(coeffs, pol, p, g, sp.brownian_increments,
                                              1.0, 1.0);
            double d = sp.x_post.back() - ex;
            sq.add(d * d);
        }
        log_err.push_back(0.5 * std::log(sq.value() / n_paths));
        log_dt.push_back(std::log(1.0 / static_cast<double>(steps)));
    }
    double slope = (log_err.back() - log_err.front()) / (log_dt.back() - log_dt.front());
    CHECK(slope >= 0.4);
}
