#include "sepmp/state.hpp"

#include <cmath>
#include <string>

#include "sepmp/errors.hpp"

namespace sepmp {

StateCoefficients StateCoefficients::log_linear(std::function<double(double)> alpha,
                                                std::function<double(double)> vol,
                                                std::function<double(double)> kappa) {
    StateCoefficients c;
    c.form = CoeffForm::LogLinear;
    c.alpha = std::move(alpha);
    c.vol = std::move(vol);
    c.kappa = std::move(kappa);
    return c;
}

StateCoefficients StateCoefficients::general(
    std::function<double(double, double, double)> b,
    std::function<double(double, double, double)> sigma,
    std::function<double(double, double, double)> gamma) {
    StateCoefficients c;
    c.form = CoeffForm::General;
    c.b = std::move(b);
    c.sigma = std::move(sigma);
    c.gamma = std::move(gamma);
    return c;
}

double StateCoefficients::eval_b(double t, double x, double pi) const {
    if (form == CoeffForm::LogLinear) return x * (alpha(t) - pi);
    return b(t, x, pi);
}
double StateCoefficients::eval_sigma(double t, double x, double pi) const {
    if (form == CoeffForm::LogLinear) return x * vol(t);
    return sigma(t, x, pi);
}
double StateCoefficients::eval_gamma(double t, double x, double pi) const {
    if (form == CoeffForm::LogLinear) return x * kappa(t);
    return gamma(t, x, pi);
}

namespace {
constexpr double kFdRel = 1e-6;

template <typename F>
double central_fd(const F& f, double v, double step) {
    return (f(v + step) - f(v - step)) / (2.0 * step);
}
}  // namespace

double StateCoefficients::db_dx(double t, double x, double pi) const {
    if (form == CoeffForm::LogLinear) return alpha(t) - pi;
    double h = kFdRel * std::max(1.0, std::abs(x));
    return central_fd([&](double v) { return b(t, v, pi); }, x, h);
}
double StateCoefficients::dsigma_dx(double t, double x, double pi) const {
    if (form == CoeffForm::LogLinear) return vol(t);
    double h = kFdRel * std::max(1.0, std::abs(x));
    return central_fd([&](double v) { return sigma(t, v, pi); }, x, h);
}
double StateCoefficients::dgamma_dx(double t, double x, double pi) const {
    if (form == CoeffForm::LogLinear) return kappa(t);
    double h = kFdRel * std::max(1.0, std::abs(x));
    return central_fd([&](double v) { return gamma(t, v, pi); }, x, h);
}
double StateCoefficients::db_dpi(double t, double x, double pi) const {
    if (form == CoeffForm::LogLinear) return -x;
    double h = kFdRel * std::max(1.0, std::abs(pi));
    return central_fd([&](double v) { return b(t, x, v); }, pi, h);
}
double StateCoefficients::dsigma_dpi(double t, double x, double pi) const {
    if (form == CoeffForm::LogLinear) return 0.0;
    double h = kFdRel * std::max(1.0, std::abs(pi));
    return central_fd([&](double v) { return sigma(t, x, v); }, pi, h);
}
double StateCoefficients::dgamma_dpi(double t, double x, double pi) const {
    if (form == CoeffForm::LogLinear) return 0.0;
    double h = kFdRel * std::max(1.0, std::abs(pi));
    return central_fd([&](double v) { return gamma(t, x, v); }, pi, h);
}

StatePath simulate_state_with_noise(const StateCoefficients& coeffs,
                                    const ControlPolicy& policy, const EventPath& events,
                                    const TimeGrid& grid,
                                    const std::vector<double>& dB, double x0) {
    const std::size_t n = grid.size();
    if (dB.size() + 1 != n) {
        throw ConfigError("simulate_state: need one Brownian increment per grid interval");
    }
    StatePath sp;
    sp.grid = grid;
    sp.events = &events;
    sp.brownian_increments = dB;
    sp.x_pre.resize(n);
    sp.x_post.resize(n);
    sp.pi.resize(n);

    auto check_finite = [&](double x, double t) {
        if (!std::isfinite(x)) {
            throw NonFiniteState("state became non-finite at t=" + std::to_string(t));
        }
        if (coeffs.form == CoeffForm::LogLinear && x <= 0.0) {
            throw PositivityViolation("log-linear state hit x<=0 at t=" + std::to_string(t));
        }
    };

    double x = x0;
    check_finite(x, grid.knots[0]);
    sp.x_pre[0] = sp.x_post[0] = x;
    sp.pi[0] = policy(grid.knots[0], x);

    for (std::size_t k = 0; k + 1 < n; ++k) {
        double t = grid.knots[k];
        double t1 = grid.knots[k + 1];
        double dt = t1 - t;
        double pik = policy(t, x);
        sp.pi[k] = pik;
        double x_next = x + coeffs.eval_b(t, x, pik) * dt +
                        coeffs.eval_sigma(t, x, pik) * dB[k];
        sp.x_pre[k + 1] = x_next;
        if (grid.is_event[k + 1]) {
            double y = events.marks[grid.event_index[k + 1]];
            double pi_pre = policy(t1, x_next);
            x_next += coeffs.eval_gamma(t1, x_next, pi_pre) * y;
        }
        check_finite(x_next, t1);
        sp.x_post[k + 1] = x_next;
        x = x_next;
    }
    sp.pi[n - 1] = policy(grid.knots[n - 1], x);
    return sp;
}

StatePath simulate_state(const StateCoefficients& coeffs, const ControlPolicy& policy,
                         const EventPath& events, const TimeGrid& grid,
                         PathStreams& streams, double x0) {
    std::vector<double> dB(grid.size() - 1);
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        double dt = grid.knots[k + 1] - grid.knots[k];
        dB[k] = std::sqrt(dt) * streams.brownian.normal();
    }
    return simulate_state_with_noise(coeffs, policy, events, grid, dB, x0);
}

double exact_loglinear_state(const StateCoefficients& coeffs, const ControlPolicy& policy,
                             const EventPath& events, const TimeGrid& grid,
                             const std::vector<double>& dB, double t, double x0) {
    if (coeffs.form != CoeffForm::LogLinear) {
        throw ConfigError("exact_loglinear_state requires LogLinear coefficients");
    }
    if (!(x0 > 0.0)) {
        throw ConfigError("exact_loglinear_state requires x0 > 0");
    }
    // policy must be evaluable without state feedback on the benchmark path;
    // x passed to it is a placeholder (deterministic policies ignore it).
    auto drift = [&](double s) {
        double v = coeffs.vol(s);
        return coeffs.alpha(s) - policy(s, x0) - 0.5 * v * v;
    };

    double exponent = 0.0;
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        double a = grid.knots[k];
        double b = grid.knots[k + 1];
        if (a >= t) break;
        double hi = std::min(b, t);
        double dt_k = hi - a;
        // trapezoid for the dt integral
        exponent += 0.5 * (drift(a) + drift(hi)) * dt_k;
        // left-point Itô for the Brownian integral; scale partial steps
        exponent += coeffs.vol(a) * dB[k] * (dt_k / (b - a));
    }
    for (std::size_t i = 0; i < events.times.size(); ++i) {
        if (events.times[i] > t) break;
        double ky = coeffs.kappa(events.times[i]) * events.marks[i];
        exponent += ky - 0.5 * ky * ky;
    }
    return x0 * std::exp(exponent);
}

}  // namespace sepmp
