#include <doctest.h>

#include <cmath>
#include <vector>

#include "sepmp/control.hpp"
#include "sepmp/errors.hpp"

using namespace sepmp;

namespace {

IntensityModel poisson_model(double lambda0 = 1.0) {
    IntensityModel m;
    m.lambda0 = lambda0;
    m.drift_kind = DriftKind::Zero;
    m.beta = 0.0;
    return m;
}

MarkKernel constant_marks(double c) {
    MarkKernel k;
    k.kind = MarkKind::Constant;
    k.constant = c;
    k.mode = MarkMode::Predictable;
    return k;
}

RunningReward log_reward(double theta) {
    RunningReward r;
    r.h = [](double, double x, double pi) { return std::log(x * pi); };
    r.g = [theta](double x) { return theta * std::log(x); };
    r.g_prime = [theta](double x) { return theta / x; };
    r.h_x = [](double, double x, double) { return 1.0 / x; };
    r.h_pi = [](double, double, double pi) { return 1.0 / pi; };
    return r;
}

StateCoefficients loglinear_consts(double a, double v, double kap) {
    return StateCoefficients::log_linear([a](double) { return a; },
                                         [v](double) { return v; },
                                         [kap](double) { return kap; });
}

// the same log-linear coefficients, but through the general interface so
// partials come from finite differences
StateCoefficients loglinear_as_general(double a, double v, double kap) {
    return StateCoefficients::general(
        [a](double, double x, double pi) { return x * (a - pi); },
        [v](double, double x, double) { return x * v; },
        [kap](double, double x, double) { return x * kap; });
}

ProblemSetup degenerate_setup(double x0 = 1.0, double horizon = 1.0) {
    ProblemSetup s;
    s.model = poisson_model();
    s.kernel = constant_marks(0.5);
    s.coeffs = StateCoefficients::general(
        [](double, double, double) { return 0.0; },
        [](double, double, double) { return 0.0; },
        [](double, double, double) { return 0.0; });
    s.x0 = x0;
    s.horizon = horizon;
    s.base_steps = 32;
    return s;
}

}  // namespace

TEST_CASE("hamiltonian: log-utility hand value") {
    auto coeffs = loglinear_consts(0.1, 0.3, 0.2);
    RunningReward r = log_reward(1.0);
    AdjointTriple adj{1.0, 0.0, 0.0};
    HamiltonianContext ctx{1.0, 2.0};
    CHECK(hamiltonian(0.0, 1.0, 1.0, adj, ctx, coeffs, r) ==
          doctest::Approx(-0.5).epsilon(1e-14));
}

TEST_CASE("hamiltonian: reward-only and jump-free reductions") {
    auto coeffs = loglinear_consts(0.1, 0.3, 0.2);
    RunningReward r = log_reward(1.0);
    HamiltonianContext ctx{0.7, 1.3};

    AdjointTriple zero{};
    CHECK(hamiltonian(0.2, 2.0, 0.5, zero, ctx, coeffs, r) ==
          doctest::Approx(std::log(1.0)).epsilon(1e-14));

    auto nojump = loglinear_consts(0.1, 0.3, 0.0);
    AdjointTriple adj{2.0, -1.0, 0.0};
    double x = 1.5, pi = 0.4, t = 0.2;
    double expected = r.h(t, x, pi) + nojump.eval_b(t, x, pi) * adj.p +
                      nojump.eval_sigma(t, x, pi) * adj.q;
    CHECK(hamiltonian(t, x, pi, adj, ctx, nojump, r) ==
          doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("hamiltonian_dx: hand value and trivial zero") {
    RunningReward r = log_reward(1.0);
    auto coeffs = loglinear_consts(0.3, 0.2, 0.0);
    AdjointTriple adj{1.0, 0.0, 0.0};
    HamiltonianContext ctx{1.0, 2.0};
    // alpha = pi, kappa = 0, w = q = 0: only h_x = 1/x survives
    CHECK(hamiltonian_dx(0.0, 2.0, 0.3, adj, ctx, coeffs, r) ==
          doctest::Approx(0.5).epsilon(1e-13));

    RunningReward flat;
    flat.h = [](double, double, double pi) { return pi; };
    flat.g = [](double) { return 0.0; };
    flat.g_prime = [](double) { return 0.0; };
    AdjointTriple zero{};
    CHECK(hamiltonian_dx(0.1, 3.0, 0.5, zero, ctx, coeffs, flat) ==
          doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("hamiltonian partials agree with finite differences") {
    RunningReward r = log_reward(1.0);
    RngStream rng = RngStream::derive(909, 0, 0);
    for (int i = 0; i < 100; ++i) {
        double a = rng.uniform() - 0.5;
        double v = rng.uniform();
        double kap = rng.uniform();
        double t = rng.uniform();
        double x = 0.5 + 2.0 * rng.uniform();
        double pi = 0.2 + rng.uniform();
        AdjointTriple adj{2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0,
                          2.0 * rng.uniform() - 1.0};
        HamiltonianContext ctx{rng.uniform(), 0.5 + rng.uniform()};
        auto closed = loglinear_consts(a, v, kap);
        auto fd = loglinear_as_general(a, v, kap);
        double dx_closed = hamiltonian_dx(t, x, pi, adj, ctx, closed, r);
        double dx_fd = hamiltonian_dx(t, x, pi, adj, ctx, fd, r);
        CHECK(std::abs(dx_closed - dx_fd) <= 1e-6 * std::max(1.0, std::abs(dx_closed)));
        double dpi_closed = hamiltonian_dpi(t, x, pi, adj, ctx, closed, r);
        double dpi_fd = hamiltonian_dpi(t, x, pi, adj, ctx, fd, r);
        CHECK(std::abs(dpi_closed - dpi_fd) <= 1e-6 * std::max(1.0, std::abs(dpi_closed)));
    }
}

TEST_CASE("hamiltonian_dx is affine in the adjoints") {
    RunningReward r = log_reward(1.0);
    auto coeffs = loglinear_consts(0.15, 0.25, 0.35);
    HamiltonianContext ctx{0.8, 1.7};
    AdjointTriple a1{1.3, -0.4, 0.9};
    AdjointTriple a2{-0.7, 2.1, 0.2};
    AdjointTriple sum{a1.p + a2.p, a1.q + a2.q, a1.w + a2.w};
    AdjointTriple zero{};
    double t = 0.3, x = 1.4, pi = 0.6;
    double lhs = hamiltonian_dx(t, x, pi, sum, ctx, coeffs, r);
    double rhs = hamiltonian_dx(t, x, pi, a1, ctx, coeffs, r) +
                 hamiltonian_dx(t, x, pi, a2, ctx, coeffs, r) -
                 hamiltonian_dx(t, x, pi, zero, ctx, coeffs, r);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
}

TEST_CASE("hamiltonian_dpi: log-utility values") {
    RunningReward r = log_reward(1.0);
    auto coeffs = loglinear_consts(0.1, 0.2, 0.1);
    HamiltonianContext ctx{0.5, 1.0};
    // 1/π − pX with π = 0.5, p = 1, x = 1
    AdjointTriple adj{1.0, 0.0, 0.0};
    CHECK(hamiltonian_dpi(0.0, 1.0, 0.5, adj, ctx, coeffs, r) ==
          doctest::Approx(1.0).epsilon(1e-13));
    // vanishes at π = 1/(pX)
    AdjointTriple adj2{2.0, 0.0, 0.0};
    CHECK(hamiltonian_dpi(0.0, 1.5, 1.0 / 3.0, adj2, ctx, coeffs, r) ==
          doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("performance: degenerate dynamics give T ln c with zero stderr") {
    ProblemSetup setup = degenerate_setup();
    RunningReward r = log_reward(2.0);
    MCConfig mc;
    mc.paths = 50;
    mc.master_seed = 42;
    double c = 0.7;
    MCEstimate est = performance(setup, ControlPolicy::constant(c), r, mc);
    CHECK(est.mean == doctest::Approx(setup.horizon * std::log(c)).epsilon(1e-13));
    CHECK(est.stderr_ == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("performance: same seed gives bit-identical estimates") {
    ProblemSetup setup = degenerate_setup();
    setup.coeffs = loglinear_consts(0.1, 0.2, 0.1);
    setup.model = poisson_model(1.0);
    RunningReward r = log_reward(1.0);
    MCConfig mc;
    mc.paths = 200;
    mc.master_seed = 77;
    ControlPolicy pol = ControlPolicy::constant(0.5);
    MCEstimate a = performance(setup, pol, r, mc);
    MCEstimate b = performance(setup, pol, r, mc);
    CHECK(a.mean == b.mean);
    CHECK(a.stderr_ == b.stderr_);
}

TEST_CASE("paired comparison favors the optimal policy") {
    ProblemSetup setup = degenerate_setup();
    setup.coeffs = loglinear_consts(0.1, 0.2, 0.1);
    RunningReward r = log_reward(1.0);
    MCConfig mc;
    mc.paths = 4000;
    mc.master_seed = 5;
    double T = setup.horizon;
    ControlPolicy pihat =
        ControlPolicy::deterministic([T](double t) { return 1.0 / (1.0 + T - t); });
    ControlPolicy shifted =
        ControlPolicy::deterministic([T](double t) { return 1.0 / (1.0 + T - t) + 0.2; });
    MCEstimate diff = paired_performance_diff(setup, pihat, shifted, r, mc);
    CHECK(diff.mean > 0.0);
    CHECK(diff.mean / diff.stderr_ > 2.0);
}

TEST_CASE("gamma_process degenerate and exponential cases") {
    ProblemSetup setup = degenerate_setup();
    PathStreams streams = PathStreams::derive(11, 0);
    EventPath events = simulate_events(setup.model, setup.kernel, setup.horizon, streams);
    TimeGrid grid = TimeGrid::build(setup.horizon, 256, events);
    std::vector<double> dB(grid.size() - 1, 0.0);
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        double dt = grid.knots[k + 1] - grid.knots[k];
        dB[k] = std::sqrt(dt) * streams.brownian.normal();
    }

    auto zero_fn = [](double) { return 0.0; };
    auto gam0 = gamma_process(zero_fn, zero_fn, zero_fn, events, grid, dB);
    for (double g : gam0) CHECK(g == 1.0);

    double a = 0.6;
    auto gam1 = gamma_process([a](double) { return a; }, zero_fn, zero_fn, events, grid, dB);
    CHECK(gam1.back() == doctest::Approx(std::exp(a * setup.horizon)).epsilon(2e-3));
}

TEST_CASE("gamma_process exponential martingale has unit mean") {
    ProblemSetup setup = degenerate_setup();
    auto zero_fn = [](double) { return 0.0; };
    auto vol_fn = [](double) { return 0.5; };
    const std::size_t n = 100000;
    std::vector<double> terminal(n);
    for (std::size_t i = 0; i < n; ++i) {
        PathStreams streams = PathStreams::derive(313, i);
        EventPath events;
        events.model = setup.model;
        events.horizon = setup.horizon;
        events.lambda_initial = setup.model.lambda0;
        TimeGrid grid = TimeGrid::build(setup.horizon, 64, events);
        std::vector<double> dB(grid.size() - 1);
        for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
            double dt = grid.knots[k + 1] - grid.knots[k];
            dB[k] = std::sqrt(dt) * streams.brownian.normal();
        }
        terminal[i] = gamma_process(zero_fn, vol_fn, zero_fn, events, grid, dB).back();
    }
    MCEstimate est = reduce_mean(terminal);
    CHECK(std::abs(est.mean - 1.0) <= 3.0 * est.stderr_);
}

TEST_CASE("linear_bsde_solve degenerate cases") {
    ProblemSetup setup = degenerate_setup();
    ControlPolicy pol = ControlPolicy::constant(0.5);
    PathStreams streams = PathStreams::derive(21, 0);
    EventPath events = simulate_events(setup.model, setup.kernel, setup.horizon, streams);
    TimeGrid grid = TimeGrid::build(setup.horizon, setup.base_steps, events);
    StatePath prefix = simulate_state(setup.coeffs, pol, events, grid, streams, setup.x0);

    auto zero_fn = [](double) { return 0.0; };
    LinearBsde constant_f;
    constant_f.phi = [](double, double) { return 0.0; };
    constant_f.terminal = [](double) { return 4.25; };
    constant_f.gamma_alpha = zero_fn;
    constant_f.gamma_vol = zero_fn;
    constant_f.gamma_kappa = zero_fn;
    MCEstimate p0 = linear_bsde_solve(setup, pol, constant_f, 0.5, prefix, 21, 0, 64);
    CHECK(p0.mean == doctest::Approx(4.25).epsilon(1e-13));

    LinearBsde clock;
    clock.phi = [](double, double) { return 1.0; };
    clock.terminal = [](double) { return 0.0; };
    clock.gamma_alpha = zero_fn;
    clock.gamma_vol = zero_fn;
    clock.gamma_kappa = zero_fn;
    MCEstimate p1 = linear_bsde_solve(setup, pol, clock, 0.25, prefix, 21, 0, 64);
    CHECK(p1.mean == doctest::Approx(0.75).epsilon(1e-10));
    MCEstimate p2 = linear_bsde_solve(setup, pol, clock, 1.0, prefix, 21, 0, 64);
    CHECK(p2.mean == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("linear_bsde_solve rejects an undersized inner ensemble") {
    ProblemSetup setup = degenerate_setup();
    ControlPolicy pol = ControlPolicy::constant(0.5);
    PathStreams streams = PathStreams::derive(22, 0);
    EventPath events = simulate_events(setup.model, setup.kernel, setup.horizon, streams);
    TimeGrid grid = TimeGrid::build(setup.horizon, setup.base_steps, events);
    StatePath prefix = simulate_state(setup.coeffs, pol, events, grid, streams, setup.x0);
    LinearBsde b;
    auto zero_fn = [](double) { return 0.0; };
    b.phi = [](double, double) { return 0.0; };
    b.terminal = [](double) { return 1.0; };
    b.gamma_alpha = zero_fn;
    b.gamma_vol = zero_fn;
    b.gamma_kappa = zero_fn;
    CHECK_THROWS_AS(linear_bsde_solve(setup, pol, b, 0.5, prefix, 22, 0, 1), ConfigError);
}

TEST_CASE("derivative_process: zero direction and pure drift forcing") {
    ProblemSetup setup = degenerate_setup();
    ControlPolicy pol = ControlPolicy::constant(0.5);
    PathStreams streams = PathStreams::derive(33, 0);
    EventPath events = simulate_events(setup.model, setup.kernel, setup.horizon, streams);
    TimeGrid grid = TimeGrid::build(setup.horizon, 64, events);
    StatePath base = simulate_state(setup.coeffs, pol, events, grid, streams, setup.x0);

    auto zero_dir = [](double) { return 0.0; };
    auto x0 = derivative_process(setup.coeffs, pol, zero_dir, base);
    for (double v : x0) CHECK(v == 0.0);

    // b = π, σ = γ = 0: dx = β dt, so with β ≡ 1 the sensitivity is x_t = t
    auto drift_only = StateCoefficients::general(
        [](double, double, double pi) { return pi; },
        [](double, double, double) { return 0.0; },
        [](double, double, double) { return 0.0; });
    StatePath base2 = simulate_state(drift_only, pol, events, grid, streams, setup.x0);
    auto one_dir = [](double) { return 1.0; };
    auto xt = derivative_process(drift_only, pol, one_dir, base2);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        CHECK(xt[k] == doctest::Approx(grid.knots[k]).epsilon(1e-6));
    }
}

TEST_CASE("directional_derivative: zero direction, closed form, antisymmetry") {
    ProblemSetup setup = degenerate_setup();
    RunningReward r = log_reward(1.0);
    MCConfig mc;
    mc.paths = 100;
    mc.master_seed = 17;
    ControlPolicy pol = ControlPolicy::constant(0.7);

    auto zero_dir = [](double) { return 0.0; };
    MCEstimate d0 = directional_derivative(setup, pol, zero_dir, 1e-3, r, mc);
    CHECK(d0.mean == 0.0);
    CHECK(d0.stderr_ == 0.0);

    // degenerate dynamics: J(c) = T ln c, so the derivative along β ≡ 1 is T/c
    auto one_dir = [](double) { return 1.0; };
    MCEstimate d1 = directional_derivative(setup, pol, one_dir, 1e-3, r, mc);
    CHECK(d1.mean == doctest::Approx(setup.horizon / 0.7).epsilon(1e-5));

    // extrapolation is exact when the estimator is unbiased in the step size
    MCEstimate dx = directional_derivative_extrapolated(setup, pol, one_dir, 1e-3, r, mc);
    CHECK(dx.mean == doctest::Approx(setup.horizon / 0.7).epsilon(1e-5));

    setup.coeffs = loglinear_consts(0.1, 0.2, 0.1);
    MCEstimate plus = directional_derivative(setup, pol, one_dir, 1e-3, r, mc);
    auto neg_dir = [](double) { return -1.0; };
    MCEstimate minus = directional_derivative(setup, pol, neg_dir, 1e-3, r, mc);
    CHECK(plus.mean == -minus.mean);
    CHECK(plus.stderr_ == minus.stderr_);
}
