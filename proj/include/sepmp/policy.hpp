#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <string>

#include "sepmp/errors.hpp"

namespace sepmp {

// Control rule t (or t, X_t) ↦ π_t, with admissibility bounds. Values
// outside the bounds are configuration errors and raise, never clamp.
class ControlPolicy {
public:
    static ControlPolicy deterministic(std::function<double(double)> fn) {
        ControlPolicy p;
        p.det_ = std::move(fn);
        return p;
    }
    static ControlPolicy constant(double c) {
        return deterministic([c](double) { return c; });
    }
    static ControlPolicy feedback(std::function<double(double, double)> fn) {
        ControlPolicy p;
        p.fb_ = std::move(fn);
        return p;
    }
    // base + y * direction(t)
    static ControlPolicy perturbed(ControlPolicy base, std::function<double(double)> direction,
                                   double y) {
        ControlPolicy p;
        p.base_ = std::make_shared<ControlPolicy>(std::move(base));
        p.direction_ = std::move(direction);
        p.y_ = y;
        p.lo_ = p.base_->lo_;
        p.hi_ = p.base_->hi_;
        return p;
    }

    ControlPolicy with_bounds(double lo, double hi) const {
        ControlPolicy p = *this;
        p.lo_ = lo;
        p.hi_ = hi;
        return p;
    }

    double operator()(double t, double x) const {
        double v;
        if (base_) {
            v = (*base_)(t, x) + y_ * direction_(t);
        } else if (fb_) {
            v = fb_(t, x);
        } else {
            v = det_(t);
        }
        if (v < lo_ || v > hi_) {
            throw ConfigError("policy value " + std::to_string(v) + " at t=" +
                              std::to_string(t) + " outside admissible [" +
                              std::to_string(lo_) + ", " + std::to_string(hi_) + "]");
        }
        return v;
    }

private:
    std::function<double(double)> det_;
    std::function<double(double, double)> fb_;
    std::shared_ptr<ControlPolicy> base_;
    std::function<double(double)> direction_;
    double y_ = 0.0;
    double lo_ = -std::numeric_limits<double>::infinity();
    double hi_ = std::numeric_limits<double>::infinity();
};

}  // namespace sepmp
