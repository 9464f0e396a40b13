#include "sepmp/logutility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sepmp/errors.hpp"
#include "sepmp/parallel.hpp"

namespace sepmp {

void LogUtilityConfig::validate() const {
    model.validate();
    kernel.validate();
    if (!(theta > 0.0)) throw ConfigError("logutility.theta must be > 0");
    if (!(x0 > 0.0)) throw ConfigError("logutility.x0 must be > 0");
    if (!(horizon > 0.0)) throw ConfigError("logutility.horizon must be > 0");
    if (!(pi_min > 0.0)) throw ConfigError("logutility.pi_min must be > 0");
    if (!(pi_max > pi_min)) throw ConfigError("logutility.pi_max must exceed pi_min");
    // π̂ is monotone increasing in t, so checking the endpoints suffices
    double lo = 1.0 / (theta + horizon);
    double hi = 1.0 / theta;
    if (lo < pi_min || hi > pi_max) {
        throw ConfigError("logutility: optimal control 1/(theta+T-t) leaves [pi_min, pi_max]");
    }
    for (double t : {0.0, 0.5 * horizon, horizon}) {
        if (kappa(t) < 0.0) throw ConfigError("logutility.kappa must be >= 0");
    }
}

ProblemSetup LogUtilityConfig::setup() const {
    ProblemSetup s;
    s.model = model;
    s.kernel = kernel;
    s.coeffs = StateCoefficients::log_linear(alpha, vol, kappa);
    s.x0 = x0;
    s.horizon = horizon;
    s.base_steps = base_steps;
    return s;
}

RunningReward LogUtilityConfig::reward() const {
    RunningReward r;
    double th = theta;
    r.h = [](double, double x, double pi) { return std::log(x * pi); };
    r.g = [th](double x) { return th * std::log(x); };
    r.g_prime = [th](double x) { return th / x; };
    r.h_x = [](double, double x, double) { return 1.0 / x; };
    r.h_pi = [](double, double, double pi) { return 1.0 / pi; };
    return r;
}

ControlPolicy LogUtilityConfig::optimal_policy() const {
    double th = theta;
    double T = horizon;
    return ControlPolicy::deterministic([th, T](double t) { return 1.0 / (th + T - t); })
        .with_bounds(pi_min, pi_max);
}

LinearBsde LogUtilityConfig::adjoint_bsde() const {
    // With Γ = X the Γ-drift is α − π̂; vol and κ are those of the wealth SDE.
    LinearBsde b;
    double th = theta;
    double T = horizon;
    auto a = alpha;
    b.phi = [](double, double x) { return 1.0 / x; };
    b.terminal = [th](double xT) { return th / xT; };
    b.gamma_alpha = [a, th, T](double t) { return a(t) - 1.0 / (th + T - t); };
    b.gamma_vol = vol;
    b.gamma_kappa = kappa;
    return b;
}

double optimal_control(const LogUtilityConfig& config, double t) {
    return 1.0 / (config.theta + config.horizon - t);
}

double adjoint_closed_form(const LogUtilityConfig& config, double t, double x_t) {
    if (!(x_t > 0.0)) throw ConfigError("adjoint_closed_form: x_t must be > 0");
    return (config.theta + config.horizon - t) / x_t;
}

bool FocReport::all_pass() const {
    if (!algebraic_pass) return false;
    for (const auto& c : checkpoints) {
        if (!c.pass) return false;
    }
    return true;
}

FocReport first_order_condition_check(const LogUtilityConfig& config,
                                      const std::vector<double>& checkpoints,
                                      const MCConfig& mc) {
    config.validate();
    ProblemSetup setup = config.setup();
    ControlPolicy pihat = config.optimal_policy();
    LinearBsde bsde = config.adjoint_bsde();

    FocReport report;

    // per-checkpoint accumulators of p̂·X across outer paths
    std::vector<std::vector<double>> px(checkpoints.size(),
                                        std::vector<double>(mc.paths));
    std::vector<double> residuals(mc.paths, 0.0);

    parallel_for(mc.paths, [&](std::size_t i) {
        PathStreams streams = PathStreams::derive(mc.master_seed, i);
        EventPath events = simulate_events(setup.model, setup.kernel, setup.horizon,
                                           streams, setup.max_events);
        TimeGrid grid = TimeGrid::build(setup.horizon, setup.base_steps, events);
        StatePath sp = simulate_state(setup.coeffs, pihat, events, grid, streams,
                                      setup.x0);
        // algebraic identity 1/π̂ − pX with the closed-form p, along the path
        double worst = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            double t = grid.knots[k];
            double x = sp.x_post[k];
            double resid =
                1.0 / optimal_control(config, t) - adjoint_closed_form(config, t, x) * x;
            worst = std::max(worst, std::abs(resid));
        }
        residuals[i] = worst;

        for (std::size_t c = 0; c < checkpoints.size(); ++c) {
            double t = checkpoints[c];
            // snap to the nearest grid knot (checkpoints are chosen on the base grid)
            std::size_t kt = 0;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < grid.size(); ++k) {
                double d = std::abs(grid.knots[k] - t);
                if (d < best) {
                    best = d;
                    kt = k;
                }
            }
            double tk = grid.knots[kt];
            MCEstimate p = linear_bsde_solve(setup, pihat, bsde, tk, sp, mc.master_seed,
                                             i, mc.inner_paths);
            px[c][i] = p.mean * sp.x_post[kt];
        }
    });

    report.max_algebraic_residual = *std::max_element(residuals.begin(), residuals.end());
    report.algebraic_pass = report.max_algebraic_residual <= 1e-12;

    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        FocCheckpoint chk;
        chk.t = checkpoints[c];
        chk.target = config.theta + config.horizon - checkpoints[c];
        chk.p_times_x = reduce_mean(px[c]);
        double err = chk.p_times_x.mean - chk.target;
        // the estimator is exact for this configuration up to rounding, so
        // guard the studentized comparison with a relative epsilon floor
        double tol = 3.0 * chk.p_times_x.stderr_ + 1e-12 * std::abs(chk.target);
        chk.z = chk.p_times_x.stderr_ > 0.0 ? err / chk.p_times_x.stderr_ : 0.0;
        chk.pass = std::abs(err) <= tol;
        report.checkpoints.push_back(chk);
    }
    return report;
}

bool DominanceReport::any_rival_beats_optimal() const {
    for (const auto& r : rows) {
        if (r.beats_optimal) return true;
    }
    return false;
}

DominanceReport dominance_experiment(
    const LogUtilityConfig& config,
    const std::vector<std::pair<std::string, ControlPolicy>>& rivals, const MCConfig& mc) {
    config.validate();
    ProblemSetup setup = config.setup();
    RunningReward reward = config.reward();
    ControlPolicy pihat = config.optimal_policy();

    DominanceReport report;
    report.optimal_value = performance(setup, pihat, reward, mc);

    for (const auto& [name, rival] : rivals) {
        DominanceRow row;
        row.policy_id = name;
        row.value = performance(setup, rival, reward, mc);
        row.diff_vs_optimal = paired_performance_diff(setup, pihat, rival, reward, mc);
        row.z = row.diff_vs_optimal.stderr_ > 0.0
                    ? row.diff_vs_optimal.mean / row.diff_vs_optimal.stderr_
                    : 0.0;
        row.beats_optimal =
            row.diff_vs_optimal.mean < -3.0 * row.diff_vs_optimal.stderr_;
        report.rows.push_back(row);
    }
    std::sort(report.rows.begin(), report.rows.end(),
              [](const DominanceRow& a, const DominanceRow& b) {
                  return a.value.mean > b.value.mean;
              });
    return report;
}

}  // namespace sepmp
