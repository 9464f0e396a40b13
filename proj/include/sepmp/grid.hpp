#pragma once

#include <cstddef>
#include <vector>

#include "sepmp/events.hpp"

namespace sepmp {

// Base uniform grid on [start, horizon] unioned with all event times of one
// path. Knots are strictly increasing; every event time appears exactly once.
struct TimeGrid {
    double start = 0.0;
    double horizon = 0.0;
    std::size_t base_steps = 0;
    std::vector<double> knots;
    std::vector<bool> is_event;  // per knot
    std::vector<std::size_t> event_index;  // valid where is_event

    static TimeGrid build(double horizon, std::size_t base_steps,
                          const EventPath& events, double start = 0.0);

    std::size_t size() const { return knots.size(); }
};

}  // namespace sepmp
