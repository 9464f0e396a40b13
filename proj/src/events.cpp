#include "sepmp/events.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "sepmp/errors.hpp"

namespace sepmp {

std::size_t EventPath::count_at(double t) const {
    if (t < start_time || t > horizon + 1e-12) {
        throw std::out_of_range("count_at: t=" + std::to_string(t) + " outside path range");
    }
    return static_cast<std::size_t>(
        std::upper_bound(times.begin(), times.end(), t) - times.begin());
}

std::size_t EventPath::segment_at(double s) const {
    // left-continuous: s ∈ (T_{i−1}, T_i] belongs to segment i−1
    return static_cast<std::size_t>(
        std::lower_bound(times.begin(), times.end(), s) - times.begin());
}

double EventPath::intensity_at(double t) const {
    if (t < start_time || t > horizon + 1e-12) {
        throw std::out_of_range("intensity_at: t outside path range");
    }
    std::size_t n = count_at(t);
    if (n == 0) return model.flow(lambda_initial, t - start_time);
    return model.flow(lambda_post[n - 1], t - times[n - 1]);
}

double jump_process_value(const EventPath& path, double t) {
    std::size_t n = path.count_at(t);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += path.marks[i];
    return sum;
}

double quadratic_variation_of_U(const EventPath& path, double t) {
    std::size_t n = path.count_at(t);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += path.marks[i] * path.marks[i];
    return sum;
}

EventPath simulate_events_from(const IntensityModel& model, const MarkKernel& kernel,
                               double t0, double horizon, double lambda_start,
                               double pending_mark, bool have_pending,
                               PathStreams& streams, std::size_t max_events) {
    model.validate();
    kernel.validate();
    if (!(horizon > t0)) {
        throw ConfigError("simulate_events: horizon must exceed start time");
    }

    EventPath path;
    path.model = model;
    path.start_time = t0;
    path.horizon = horizon;
    path.lambda_initial = lambda_start;
    path.mark_mode = kernel.mode;

    double t = t0;
    double lam = lambda_start;  // λ at t (post-jump / flowed value)

    bool predictable = kernel.mode == MarkMode::Predictable;
    double pending = pending_mark;
    if (predictable && !have_pending) {
        pending = kernel.draw(lam, model, streams.marks);
    }

    while (true) {
        double majorant = std::max(lam, model.lambda0);
        double tau = streams.candidates.exponential(majorant);
        double tc = t + tau;
        if (tc >= horizon) break;
        double lam_tc = model.flow(lam, tc - t);
        double u = streams.candidates.uniform();
        if (u * majorant <= lam_tc) {
            // accepted event at tc
            double y;
            if (predictable) {
                y = pending;
            } else {
                y = kernel.draw(lam_tc, model, streams.marks);
            }
            double lam_post = lam_tc + model.beta * y;
            path.times.push_back(tc);
            path.marks.push_back(y);
            path.lambda_pre.push_back(lam_tc);
            path.lambda_post.push_back(lam_post);
            lam = lam_post;
            t = tc;
            // in AtJump mode this draw only defines the marker on the open segment
            pending = kernel.draw(lam, model, streams.marks);
            if (path.times.size() >= max_events) {
                path.max_events_hit = true;
                break;
            }
        } else {
            // rejected; advance and refresh the majorant at tc
            lam = lam_tc;
            t = tc;
        }
    }
    path.pending_mark = pending;
    return path;
}

EventPath simulate_events(const IntensityModel& model, const MarkKernel& kernel,
                          double horizon, PathStreams& streams,
                          std::size_t max_events) {
    return simulate_events_from(model, kernel, 0.0, horizon, model.lambda0, 0.0,
                                false, streams, max_events);
}

}  // namespace sepmp
