#pragma once

#include <cstddef>
#include <vector>

#include "sepmp/intensity.hpp"
#include "sepmp/marks.hpp"
#include "sepmp/rng.hpp"

namespace sepmp {

// One realized path of the jump machinery: event times T_1 < T_2 < ... with
// marks Y_i, the pre/post-jump intensity at each event, and the pending mark
// for the open segment past the last event. λ between events is recovered
// from the closed-form flow, so the path is exact (no time discretization).
struct EventPath {
    IntensityModel model;
    double start_time = 0.0;
    double horizon = 0.0;
    double lambda_initial = 0.0;  // λ at start_time
    std::vector<double> times;
    std::vector<double> marks;
    std::vector<double> lambda_pre;   // λ_{T_i−}
    std::vector<double> lambda_post;  // λ_{T_i}
    double pending_mark = 0.0;        // the already-drawn mark of the open segment
    MarkMode mark_mode = MarkMode::Predictable;
    bool max_events_hit = false;

    std::size_t count_at(double t) const;  // N_t, right-continuous
    double intensity_at(double t) const;   // λ_t, right-continuous

    // Segment index containing s under the left-continuous convention:
    // s ∈ (T_{i−1}, T_i] maps to i−1 (0-based); past the last event returns
    // times.size() (the open segment carried by pending_mark).
    std::size_t segment_at(double s) const;
};

// U_t = Σ_{T_i ≤ t} Y_i.
double jump_process_value(const EventPath& path, double t);

// [U]_t = Σ_{T_i ≤ t} Y_i², exact for this finite-activity pure-jump process.
double quadratic_variation_of_U(const EventPath& path, double t);

// Ogata thinning with the closed-form inter-event flow. Between candidates
// the majorant is max(λ, λ0), valid for the mean-reverting family with β ≥ 0;
// it is refreshed after every accepted or rejected candidate, so acceptance
// is exact. Sets max_events_hit and truncates when the cap is reached.
EventPath simulate_events(const IntensityModel& model, const MarkKernel& kernel,
                          double horizon, PathStreams& streams,
                          std::size_t max_events = 1000000);

// Continuation from (t0, lambda_start, pending_mark); used by nested
// estimators that branch off an existing prefix.
EventPath simulate_events_from(const IntensityModel& model, const MarkKernel& kernel,
                               double t0, double horizon, double lambda_start,
                               double pending_mark, bool have_pending,
                               PathStreams& streams, std::size_t max_events = 1000000);

}  // namespace sepmp
