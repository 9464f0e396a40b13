#pragma once

#include <string>
#include <vector>

#include "sepmp/control.hpp"

namespace sepmp {

// The log-utility application: linear self-exciting wealth SDE
// dX = X_{t−}((α_t − π_t)dt + vol_t dB + κ_{t−} dU), reward
// J(π) = E[∫ ln(X_t π_t)dt + θ ln X_T], constant terminal weight θ > 0.
struct LogUtilityConfig {
    IntensityModel model;
    MarkKernel kernel;
    std::function<double(double)> alpha;
    std::function<double(double)> vol;
    std::function<double(double)> kappa;  // >= 0
    double theta = 1.0;
    double x0 = 1.0;
    double horizon = 1.0;
    double pi_min = 1e-6;
    double pi_max = 1e6;
    std::size_t base_steps = 256;

    void validate() const;  // includes: π̂_t inside [pi_min, pi_max] on [0, T]

    ProblemSetup setup() const;
    RunningReward reward() const;
    ControlPolicy optimal_policy() const;
    LinearBsde adjoint_bsde() const;  // Γ = X, φ = 1/X, F = θ/X_T
};

// π̂_t = 1/(θ + T − t); deterministic, independent of the dynamics.
double optimal_control(const LogUtilityConfig& config, double t);

// p_t = (θ + T − t)/X_t.
double adjoint_closed_form(const LogUtilityConfig& config, double t, double x_t);

struct FocCheckpoint {
    double t = 0.0;
    double target = 0.0;  // θ + T − t
    MCEstimate p_times_x;  // nested-MC estimate of p̂_t·X_t, averaged over outer paths
    double z = 0.0;
    bool pass = false;
};

struct FocReport {
    double max_algebraic_residual = 0.0;  // of 1/π̂ − pX along simulated paths
    bool algebraic_pass = false;
    std::vector<FocCheckpoint> checkpoints;
    bool all_pass() const;
};

// Verifies eq-by-construction 1/π̂ − pX = 0 along paths simulated under π̂
// (tolerance 1e−12), and statistically that nested MC reproduces the closed
// form: p̂·X_t within 3·stderr of θ + T − t at each checkpoint time.
FocReport first_order_condition_check(const LogUtilityConfig& config,
                                      const std::vector<double>& checkpoints,
                                      const MCConfig& mc);

struct DominanceRow {
    std::string policy_id;
    MCEstimate value;          // J(π)
    MCEstimate diff_vs_optimal;  // J(π̂) − J(π), paired
    double z = 0.0;            // of the paired difference
    bool beats_optimal = false;  // rival ahead by more than 3·stderr
};

struct DominanceReport {
    MCEstimate optimal_value;
    std::vector<DominanceRow> rows;  // sorted by value, best first
    bool any_rival_beats_optimal() const;
};

// Paired common-random-number comparison of J(π̂) against rival policies.
DominanceReport dominance_experiment(const LogUtilityConfig& config,
                                     const std::vector<std::pair<std::string, ControlPolicy>>& rivals,
                                     const MCConfig& mc);

}  // namespace sepmp
