#pragma once

#include <functional>
#include <vector>

#include "sepmp/events.hpp"
#include "sepmp/grid.hpp"
#include "sepmp/policy.hpp"
#include "sepmp/rng.hpp"

namespace sepmp {

enum class CoeffForm { General, LogLinear };

// Coefficients of dX = b dt + σ dB + γ dU. The LogLinear form encodes
// b = x(α_t − π), σ = x·vol_t, γ = x·κ_t and carries closed-form partials;
// General falls back to central finite differences for partials.
struct StateCoefficients {
    CoeffForm form = CoeffForm::General;

    std::function<double(double, double, double)> b;      // (t, x, π)
    std::function<double(double, double, double)> sigma;  // (t, x, π)
    std::function<double(double, double, double)> gamma;  // (t, x, π)

    // LogLinear time functions
    std::function<double(double)> alpha;
    std::function<double(double)> vol;
    std::function<double(double)> kappa;  // >= 0 so multiplicative jumps keep X > 0

    static StateCoefficients log_linear(std::function<double(double)> alpha,
                                        std::function<double(double)> vol,
                                        std::function<double(double)> kappa);
    static StateCoefficients general(std::function<double(double, double, double)> b,
                                     std::function<double(double, double, double)> sigma,
                                     std::function<double(double, double, double)> gamma);

    double eval_b(double t, double x, double pi) const;
    double eval_sigma(double t, double x, double pi) const;
    double eval_gamma(double t, double x, double pi) const;

    // Partials; closed form for LogLinear, central differences otherwise.
    double db_dx(double t, double x, double pi) const;
    double dsigma_dx(double t, double x, double pi) const;
    double dgamma_dx(double t, double x, double pi) const;
    double db_dpi(double t, double x, double pi) const;
    double dsigma_dpi(double t, double x, double pi) const;
    double dgamma_dpi(double t, double x, double pi) const;
};

// One realized controlled path on a grid. At event knots x_pre holds the
// value before the jump and x_post after; elsewhere they coincide.
struct StatePath {
    TimeGrid grid;
    std::vector<double> x_pre;
    std::vector<double> x_post;
    std::vector<double> brownian_increments;  // ΔB over (knot_k, knot_{k+1}]
    std::vector<double> pi;                   // control at each knot
    const EventPath* events = nullptr;

    double terminal() const { return x_post.back(); }
};

// Euler–Maruyama between knots; at event knots the jump γ(t−, X_pre, π_pre)·Y
// is applied after the diffusion step. Brownian increments come from
// streams.brownian. Throws NonFiniteState on NaN/inf and PositivityViolation
// for LogLinear paths that hit x <= 0.
StatePath simulate_state(const StateCoefficients& coeffs, const ControlPolicy& policy,
                         const EventPath& events, const TimeGrid& grid,
                         PathStreams& streams, double x0);

// As above but reusing given Brownian increments (one per grid interval);
// used for shared-noise comparisons.
StatePath simulate_state_with_noise(const StateCoefficients& coeffs,
                                    const ControlPolicy& policy, const EventPath& events,
                                    const TimeGrid& grid,
                                    const std::vector<double>& brownian_increments,
                                    double x0);

// Exponential-formula benchmark for the LogLinear form:
//   x0·exp(∫(α−π−½vol²)ds − ½Σκ²Y² + Σ vol ΔB + ΣκY)
// dt-integrals by trapezoid on the grid, stochastic integral left-point on
// the shared increments, jump integrals as exact sums over events up to t.
// Exact (up to quadrature) for the continuous part; jump handling differs
// from the multiplicative Euler rule beyond first order in κY.
double exact_loglinear_state(const StateCoefficients& coeffs, const ControlPolicy& policy,
                             const EventPath& events, const TimeGrid& grid,
                             const std::vector<double>& brownian_increments, double t,
                             double x0);

}  // namespace sepmp
