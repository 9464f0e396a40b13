#include "sepmp/grid.hpp"

#include <algorithm>
#include <cmath>

#include "sepmp/errors.hpp"

namespace sepmp {

TimeGrid TimeGrid::build(double horizon, std::size_t base_steps,
                         const EventPath& events, double start) {
    if (!(horizon > start) || base_steps == 0) {
        throw ConfigError("TimeGrid: horizon must exceed start and base_steps > 0");
    }
    TimeGrid g;
    g.start = start;
    g.horizon = horizon;
    g.base_steps = base_steps;

    std::vector<double> uniform(base_steps + 1);
    double dt = (horizon - start) / static_cast<double>(base_steps);
    for (std::size_t k = 0; k <= base_steps; ++k) {
        uniform[k] = start + dt * static_cast<double>(k);
    }
    uniform.back() = horizon;

    // merge; an event time collides with a uniform knot only on exact equality
    std::size_t iu = 0, ie = 0;
    const auto& ev = events.times;
    while (iu < uniform.size() || ie < ev.size()) {
        bool take_event;
        if (iu == uniform.size()) {
            take_event = true;
        } else if (ie == ev.size()) {
            take_event = false;
        } else {
            take_event = ev[ie] <= uniform[iu];
        }
        if (take_event) {
            if (ev[ie] < start || ev[ie] > horizon) {
                throw ConfigError("TimeGrid: event time outside [start, horizon]");
            }
            if (iu < uniform.size() && ev[ie] == uniform[iu]) ++iu;
            g.knots.push_back(ev[ie]);
            g.is_event.push_back(true);
            g.event_index.push_back(ie);
            ++ie;
        } else {
            g.knots.push_back(uniform[iu]);
            g.is_event.push_back(false);
            g.event_index.push_back(0);
            ++iu;
        }
    }
    return g;
}

}  // namespace sepmp
