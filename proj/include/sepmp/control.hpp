#pragma once

#include <cstdint>
#include <functional>

#include "sepmp/events.hpp"
#include "sepmp/grid.hpp"
#include "sepmp/policy.hpp"
#include "sepmp/state.hpp"
#include "sepmp/summation.hpp"

namespace sepmp {

// Running reward h, terminal reward g and its derivative. Closed-form
// partials of h are optional; finite differences fill in when absent.
struct RunningReward {
    std::function<double(double, double, double)> h;  // (t, x, π)
    std::function<double(double)> g;
    std::function<double(double)> g_prime;
    std::function<double(double, double, double)> h_x;   // optional
    std::function<double(double, double, double)> h_pi;  // optional

    double eval_h_x(double t, double x, double pi) const;
    double eval_h_pi(double t, double x, double pi) const;
};

struct AdjointTriple {
    double p = 0.0;
    double q = 0.0;
    double w = 0.0;
};

// Path context entering the Hamiltonian: the linear marker value Ȳ_t and the
// intensity λ_t.
struct HamiltonianContext {
    double ybar = 0.0;
    double lambda = 0.0;
};

// H = h + (b + Ȳλγ)p + σq + λ(Ȳ²γ + Ȳx)w
double hamiltonian(double t, double x, double pi, const AdjointTriple& adj,
                   const HamiltonianContext& ctx, const StateCoefficients& coeffs,
                   const RunningReward& reward);

// ∂H/∂x = h_x + (b_x + Ȳλγ_x)p + σ_x q + λw(Ȳ + Ȳ²γ_x)
double hamiltonian_dx(double t, double x, double pi, const AdjointTriple& adj,
                      const HamiltonianContext& ctx, const StateCoefficients& coeffs,
                      const RunningReward& reward);

// ∂H/∂π = h_π + (b_π + Ȳλγ_π)p + σ_π q + λwȲ²γ_π
double hamiltonian_dpi(double t, double x, double pi, const AdjointTriple& adj,
                       const HamiltonianContext& ctx, const StateCoefficients& coeffs,
                       const RunningReward& reward);

// Everything needed to realize one controlled path.
struct ProblemSetup {
    IntensityModel model;
    MarkKernel kernel;
    StateCoefficients coeffs;
    double x0 = 1.0;
    double horizon = 1.0;
    std::size_t base_steps = 256;
    std::size_t max_events = 1000000;
};

struct MCConfig {
    std::size_t paths = 10000;
    std::size_t inner_paths = 256;
    std::uint64_t master_seed = 0;
};

// Trapezoid of h along the path plus g at the terminal value.
double path_objective(const StatePath& sp, const RunningReward& reward);

// Monte Carlo estimate of J(π) = E[∫ h dt + g(X_T)].
MCEstimate performance(const ProblemSetup& setup, const ControlPolicy& policy,
                       const RunningReward& reward, const MCConfig& mc);

// Paired estimate of J(a) − J(b) under common random numbers.
MCEstimate paired_performance_diff(const ProblemSetup& setup, const ControlPolicy& a,
                                   const ControlPolicy& b, const RunningReward& reward,
                                   const MCConfig& mc);

// Solution of dΓ = Γ_{t−}(α dt + vol dB + κ dU), Γ_start = 1, by the same
// Euler + multiplicative-jump scheme as the state engine, on shared noise.
std::vector<double> gamma_process(const std::function<double(double)>& alpha,
                                  const std::function<double(double)>& vol,
                                  const std::function<double(double)>& kappa,
                                  const EventPath& events, const TimeGrid& grid,
                                  const std::vector<double>& brownian_increments);

// Linear BSDE data: dp = −(φ + linear-in-(p,q,w)) dt + q dB + w_{t−} dU,
// p_T = F(X_T), solved by the representation p_t = E[(Γ_T/Γ_t)F + ∫(Γ_s/Γ_t)φ ds | F_t].
struct LinearBsde {
    std::function<double(double, double)> phi;  // (s, X_s)
    std::function<double(double)> terminal;     // F(X_T)
    std::function<double(double)> gamma_alpha;
    std::function<double(double)> gamma_vol;
    std::function<double(double)> gamma_kappa;
};

// Nested Monte Carlo for p_t: branches inner continuation paths off the
// F_t-prefix (state value, intensity, pending mark at t) with fresh
// substreams, and averages (Γ_T/Γ_t)F + ∫_t^T (Γ_s/Γ_t)φ ds.
MCEstimate linear_bsde_solve(const ProblemSetup& setup, const ControlPolicy& policy,
                             const LinearBsde& bsde, double t, const StatePath& prefix,
                             std::uint64_t master_seed, std::uint64_t outer_id,
                             std::size_t inner_paths);

// Euler simulation of the sensitivity SDE
//   dx = [b_x x + b_π β]dt + [σ_x x + σ_π β]dB + [γ_x x_{−} + γ_π β]dU, x_0 = 0
// along the noise and state of a realized base path.
std::vector<double> derivative_process(const StateCoefficients& coeffs,
                                       const ControlPolicy& policy,
                                       const std::function<double(double)>& direction,
                                       const StatePath& base);

// Central difference (J(π+yβ) − J(π−yβ))/(2y) under common random numbers.
MCEstimate directional_derivative(const ProblemSetup& setup, const ControlPolicy& policy,
                                  const std::function<double(double)>& direction,
                                  double y_step, const RunningReward& reward,
                                  const MCConfig& mc);

// Two-level Richardson extrapolation of directional_derivative across
// base_steps and 2·base_steps (independent seeds per level). The paired CRN
// estimator resolves differences far below the Euler scheme's O(Δt) weak
// bias, so the single-grid derivative at a continuous-time optimum is biased
// away from zero at any step count; extrapolating the leading Δt term out
// targets the continuous-limit derivative with O(Δt²) residual.
MCEstimate directional_derivative_extrapolated(const ProblemSetup& setup,
                                               const ControlPolicy& policy,
                                               const std::function<double(double)>& direction,
                                               double y_step, const RunningReward& reward,
                                               const MCConfig& mc);

}  // namespace sepmp
