#pragma once

#include <functional>

#include "sepmp/rng.hpp"

namespace sepmp {

struct IntensityModel;

enum class MarkKind { Constant, ShiftedExponential };

// When the jump size is drawn. Predictable: Y_i is drawn at the previous
// event time (Y_1 at time 0) from ν(λ at that time, ·), so it is known one
// segment ahead and the compensated processes are genuine martingales.
// AtJump: Y_i is drawn at the i-th event from ν(λ_{T_i−}, ·).
enum class MarkMode { Predictable, AtJump };

// Family ν(λ, ·) of jump-size distributions. Draws must keep λ + β·Y above
// the baseline (the support condition, rescaled by β).
struct MarkKernel {
    MarkKind kind = MarkKind::Constant;
    double constant = 1.0;
    std::function<double(double)> rate_fn;   // λ ↦ exponential rate (> 0)
    std::function<double(double)> shift_fn;  // λ ↦ shift
    MarkMode mode = MarkMode::Predictable;

    void validate() const;

    // One draw from ν(lambda, ·); checks the support condition against model.
    double draw(double lambda, const IntensityModel& model, RngStream& rng) const;
};

}  // namespace sepmp
