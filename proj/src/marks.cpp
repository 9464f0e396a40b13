#include "sepmp/marks.hpp"

#include <string>

#include "sepmp/errors.hpp"
#include "sepmp/intensity.hpp"

namespace sepmp {

void MarkKernel::validate() const {
    if (kind == MarkKind::Constant) {
        if (!(constant > 0.0)) {
            throw ConfigError("kernel.constant must be > 0, got " +
                              std::to_string(constant));
        }
    } else {
        if (!rate_fn || !shift_fn) {
            throw ConfigError("kernel: ShiftedExponential requires rate_fn and shift_fn");
        }
    }
}

double MarkKernel::draw(double lambda, const IntensityModel& model,
                        RngStream& rng) const {
    double y;
    if (kind == MarkKind::Constant) {
        y = constant;
    } else {
        double rate = rate_fn(lambda);
        if (!(rate > 0.0)) {
            throw ConfigError("kernel.rate_fn must return > 0, got " +
                              std::to_string(rate));
        }
        y = shift_fn(lambda) + rng.exponential(rate);
    }
    if (model.beta > 0.0 && lambda + model.beta * y < model.lambda0 - 1e-12) {
        throw ConfigError("kernel: draw violates support condition lambda + beta*Y >= lambda0");
    }
    return y;
}

}  // namespace sepmp
