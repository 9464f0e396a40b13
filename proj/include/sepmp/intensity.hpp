#pragma once

namespace sepmp {

enum class DriftKind { MeanReverting, Zero };

// Parameters of the intensity SDE dλ = μ(λ)dt + β dU, with μ either zero or
// the mean-reverting family μ(λ) = δ(λ0 − λ).
struct IntensityModel {
    double lambda0 = 1.0;  // baseline intensity, also the initial value
    DriftKind drift_kind = DriftKind::Zero;
    double delta = 0.0;  // mean-reversion speed (ignored for Zero drift)
    double beta = 0.0;   // jump scale; >= 0 required (thinning majorant)

    void validate() const;

    // Deterministic inter-event flow: the value of λ after dt with no jumps.
    double flow(double lambda_start, double dt) const;

    // Closed-form integral of the flow over [a, b], where the segment starts
    // at time seg_start with value lambda_start and contains [a, b].
    double flow_integral(double lambda_start, double seg_start, double a, double b) const;
};

}  // namespace sepmp
