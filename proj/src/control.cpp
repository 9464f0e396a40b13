#include "sepmp/control.hpp"

#include <cmath>

#include "sepmp/errors.hpp"
#include "sepmp/parallel.hpp"

namespace sepmp {

namespace {
constexpr double kFdRel = 1e-6;
}

double RunningReward::eval_h_x(double t, double x, double pi) const {
    if (h_x) return h_x(t, x, pi);
    double step = kFdRel * std::max(1.0, std::abs(x));
    return (h(t, x + step, pi) - h(t, x - step, pi)) / (2.0 * step);
}

double RunningReward::eval_h_pi(double t, double x, double pi) const {
    if (h_pi) return h_pi(t, x, pi);
    double step = kFdRel * std::max(1.0, std::abs(pi));
    return (h(t, x, pi + step) - h(t, x, pi - step)) / (2.0 * step);
}

double hamiltonian(double t, double x, double pi, const AdjointTriple& adj,
                   const HamiltonianContext& ctx, const StateCoefficients& coeffs,
                   const RunningReward& reward) {
    double b = coeffs.eval_b(t, x, pi);
    double sig = coeffs.eval_sigma(t, x, pi);
    double gam = coeffs.eval_gamma(t, x, pi);
    double y = ctx.ybar;
    return reward.h(t, x, pi) + (b + y * ctx.lambda * gam) * adj.p + sig * adj.q +
           ctx.lambda * (y * y * gam + y * x) * adj.w;
}

double hamiltonian_dx(double t, double x, double pi, const AdjointTriple& adj,
                      const HamiltonianContext& ctx, const StateCoefficients& coeffs,
                      const RunningReward& reward) {
    double y = ctx.ybar;
    return reward.eval_h_x(t, x, pi) +
           (coeffs.db_dx(t, x, pi) + y * ctx.lambda * coeffs.dgamma_dx(t, x, pi)) * adj.p +
           coeffs.dsigma_dx(t, x, pi) * adj.q +
           ctx.lambda * adj.w * (y + y * y * coeffs.dgamma_dx(t, x, pi));
}

double hamiltonian_dpi(double t, double x, double pi, const AdjointTriple& adj,
                       const HamiltonianContext& ctx, const StateCoefficients& coeffs,
                       const RunningReward& reward) {
    double y = ctx.ybar;
    return reward.eval_h_pi(t, x, pi) +
           (coeffs.db_dpi(t, x, pi) + y * ctx.lambda * coeffs.dgamma_dpi(t, x, pi)) * adj.p +
           coeffs.dsigma_dpi(t, x, pi) * adj.q +
           ctx.lambda * adj.w * y * y * coeffs.dgamma_dpi(t, x, pi);
}

double path_objective(const StatePath& sp, const RunningReward& reward) {
    const auto& knots = sp.grid.knots;
    KahanSum acc;
    double prev = reward.h(knots[0], sp.x_post[0], sp.pi[0]);
    for (std::size_t k = 1; k < knots.size(); ++k) {
        double cur = reward.h(knots[k], sp.x_post[k], sp.pi[k]);
        acc.add(0.5 * (prev + cur) * (knots[k] - knots[k - 1]));
        prev = cur;
    }
    return acc.value() + reward.g(sp.x_post.back());
}

namespace {

StatePath simulate_one(const ProblemSetup& setup, const ControlPolicy& policy,
                       PathStreams& streams, EventPath& events_out) {
    events_out = simulate_events(setup.model, setup.kernel, setup.horizon, streams,
                                 setup.max_events);
    if (events_out.max_events_hit) {
        throw SimulationError("event count cap reached; intensity blow-up for these parameters");
    }
    TimeGrid grid = TimeGrid::build(setup.horizon, setup.base_steps, events_out);
    return simulate_state(setup.coeffs, policy, events_out, grid, streams, setup.x0);
}

}  // namespace

MCEstimate performance(const ProblemSetup& setup, const ControlPolicy& policy,
                       const RunningReward& reward, const MCConfig& mc) {
    if (mc.paths < 2) throw ConfigError("performance: mc.paths must be >= 2");
    std::vector<double> values(mc.paths);
    parallel_for(mc.paths, [&](std::size_t i) {
        PathStreams streams = PathStreams::derive(mc.master_seed, i);
        EventPath events;
        StatePath sp = simulate_one(setup, policy, streams, events);
        values[i] = path_objective(sp, reward);
    });
    return reduce_mean(values);
}

MCEstimate paired_performance_diff(const ProblemSetup& setup, const ControlPolicy& a,
                                   const ControlPolicy& b, const RunningReward& reward,
                                   const MCConfig& mc) {
    if (mc.paths < 2) throw ConfigError("paired_performance_diff: mc.paths must be >= 2");
    std::vector<double> diffs(mc.paths);
    parallel_for(mc.paths, [&](std::size_t i) {
        PathStreams sa = PathStreams::derive(mc.master_seed, i);
        PathStreams sb = PathStreams::derive(mc.master_seed, i);
        EventPath ea, eb;
        StatePath pa = simulate_one(setup, a, sa, ea);
        StatePath pb = simulate_one(setup, b, sb, eb);
        diffs[i] = path_objective(pa, reward) - path_objective(pb, reward);
    });
    return reduce_mean(diffs);
}

std::vector<double> gamma_process(const std::function<double(double)>& alpha,
                                  const std::function<double(double)>& vol,
                                  const std::function<double(double)>& kappa,
                                  const EventPath& events, const TimeGrid& grid,
                                  const std::vector<double>& dB) {
    StateCoefficients c = StateCoefficients::log_linear(alpha, vol, kappa);
    ControlPolicy zero = ControlPolicy::constant(0.0);
    StatePath sp = simulate_state_with_noise(c, zero, events, grid, dB, 1.0);
    return sp.x_post;
}

MCEstimate linear_bsde_solve(const ProblemSetup& setup, const ControlPolicy& policy,
                             const LinearBsde& bsde, double t, const StatePath& prefix,
                             std::uint64_t master_seed, std::uint64_t outer_id,
                             std::size_t inner_paths) {
    if (inner_paths < 2) throw ConfigError("linear_bsde_solve: inner_paths must be >= 2");
    const EventPath& outer_events = *prefix.events;

    // locate t on the prefix grid
    std::size_t kt = 0;
    bool found = false;
    for (std::size_t k = 0; k < prefix.grid.size(); ++k) {
        if (prefix.grid.knots[k] == t) {
            kt = k;
            found = true;
            break;
        }
    }
    if (!found) throw ConfigError("linear_bsde_solve: t must be a grid knot");

    double x_t = prefix.x_post[kt];
    if (t == setup.horizon) {
        // terminal condition, no continuation to branch
        MCEstimate est;
        est.mean = bsde.terminal(x_t);
        est.stderr_ = 0.0;
        est.n = inner_paths;
        return est;
    }
    double lambda_t = outer_events.intensity_at(t);
    std::size_t n_t = outer_events.count_at(t);
    double pending = n_t < outer_events.marks.size() ? outer_events.marks[n_t]
                                                     : outer_events.pending_mark;
    double remaining = setup.horizon - t;
    std::size_t steps = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(
               static_cast<double>(setup.base_steps) * remaining / setup.horizon)));

    std::vector<double> samples(inner_paths);
    for (std::size_t j = 0; j < inner_paths; ++j) {
        PathStreams streams = PathStreams::derive_inner(master_seed, outer_id, j);
        EventPath cont =
            simulate_events_from(setup.model, setup.kernel, t, setup.horizon, lambda_t,
                                 pending, true, streams, setup.max_events);
        TimeGrid grid = TimeGrid::build(setup.horizon, steps, cont, t);
        std::vector<double> dB(grid.size() - 1);
        for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
            double dt = grid.knots[k + 1] - grid.knots[k];
            dB[k] = std::sqrt(dt) * streams.brownian.normal();
        }
        StatePath xc = simulate_state_with_noise(setup.coeffs, policy, cont, grid, dB, x_t);
        std::vector<double> gam = gamma_process(bsde.gamma_alpha, bsde.gamma_vol,
                                                bsde.gamma_kappa, cont, grid, dB);
        KahanSum integral;
        double prev = gam[0] * bsde.phi(grid.knots[0], xc.x_post[0]);
        for (std::size_t k = 1; k < grid.size(); ++k) {
            double cur = gam[k] * bsde.phi(grid.knots[k], xc.x_post[k]);
            integral.add(0.5 * (prev + cur) * (grid.knots[k] - grid.knots[k - 1]));
            prev = cur;
        }
        samples[j] = gam.back() * bsde.terminal(xc.x_post.back()) + integral.value();
    }
    return reduce_mean(samples);
}

std::vector<double> derivative_process(const StateCoefficients& coeffs,
                                       const ControlPolicy& policy,
                                       const std::function<double(double)>& direction,
                                       const StatePath& base) {
    const TimeGrid& grid = base.grid;
    const EventPath& events = *base.events;
    std::vector<double> x(grid.size(), 0.0);
    double cur = 0.0;
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        double t = grid.knots[k];
        double t1 = grid.knots[k + 1];
        double dt = t1 - t;
        double X = base.x_post[k];
        double pi = base.pi[k];
        double beta = direction(t);
        double next = cur +
                      (coeffs.db_dx(t, X, pi) * cur + coeffs.db_dpi(t, X, pi) * beta) * dt +
                      (coeffs.dsigma_dx(t, X, pi) * cur + coeffs.dsigma_dpi(t, X, pi) * beta) *
                          base.brownian_increments[k];
        if (grid.is_event[k + 1]) {
            double y = events.marks[grid.event_index[k + 1]];
            double x_pre = base.x_pre[k + 1];
            double pi_pre = policy(t1, x_pre);
            double beta_pre = direction(t1);
            next += (coeffs.dgamma_dx(t1, x_pre, pi_pre) * next +
                     coeffs.dgamma_dpi(t1, x_pre, pi_pre) * beta_pre) *
                    y;
        }
        if (!std::isfinite(next)) {
            throw NonFiniteState("derivative process became non-finite at t=" +
                                 std::to_string(t1));
        }
        x[k + 1] = next;
        cur = next;
    }
    return x;
}

MCEstimate directional_derivative(const ProblemSetup& setup, const ControlPolicy& policy,
                                  const std::function<double(double)>& direction,
                                  double y_step, const RunningReward& reward,
                                  const MCConfig& mc) {
    if (!(y_step > 0.0)) throw ConfigError("directional_derivative: y_step must be > 0");
    ControlPolicy up = ControlPolicy::perturbed(policy, direction, y_step);
    ControlPolicy down = ControlPolicy::perturbed(policy, direction, -y_step);
    MCEstimate diff = paired_performance_diff(setup, up, down, reward, mc);
    diff.mean /= 2.0 * y_step;
    diff.stderr_ /= 2.0 * y_step;
    return diff;
}

MCEstimate directional_derivative_extrapolated(const ProblemSetup& setup,
                                               const ControlPolicy& policy,
                                               const std::function<double(double)>& direction,
                                               double y_step, const RunningReward& reward,
                                               const MCConfig& mc) {
    ProblemSetup fine = setup;
    fine.base_steps = 2 * setup.base_steps;
    MCConfig fine_mc = mc;
    fine_mc.master_seed = RngStream::derive(mc.master_seed, 0x52494348ULL, 0).next_u64();
    MCEstimate coarse = directional_derivative(setup, policy, direction, y_step, reward, mc);
    MCEstimate refined =
        directional_derivative(fine, policy, direction, y_step, reward, fine_mc);
    MCEstimate out;
    out.mean = 2.0 * refined.mean - coarse.mean;
    out.stderr_ = std::sqrt(4.0 * refined.stderr_ * refined.stderr_ +
                            coarse.stderr_ * coarse.stderr_);
    out.n = coarse.n + refined.n;
    return out;
}

}  // namespace sepmp
