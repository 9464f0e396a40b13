#include "sepmp/intensity.hpp"

#include <cmath>
#include <string>

#include "sepmp/errors.hpp"

namespace sepmp {

void IntensityModel::validate() const {
    if (!(lambda0 > 0.0)) {
        throw ConfigError("model.lambda0 must be > 0, got " + std::to_string(lambda0));
    }
    if (beta < 0.0) {
        throw ConfigError("model.beta must be >= 0, got " + std::to_string(beta));
    }
    if (drift_kind == DriftKind::MeanReverting && delta < 0.0) {
        throw ConfigError("model.delta must be >= 0, got " + std::to_string(delta));
    }
}

double IntensityModel::flow(double lambda_start, double dt) const {
    if (drift_kind == DriftKind::Zero || delta == 0.0) return lambda_start;
    return lambda0 + (lambda_start - lambda0) * std::exp(-delta * dt);
}

double IntensityModel::flow_integral(double lambda_start, double seg_start, double a,
                                     double b) const {
    if (drift_kind == DriftKind::Zero || delta == 0.0) {
        return lambda_start * (b - a);
    }
    // ∫ λ0 + (λs−λ0) e^{−δ(t−s0)} dt on [a,b]
    double dev = lambda_start - lambda0;
    double ea = std::exp(-delta * (a - seg_start));
    double eb = std::exp(-delta * (b - seg_start));
    return lambda0 * (b - a) + dev / delta * (ea - eb);
}

}  // namespace sepmp
