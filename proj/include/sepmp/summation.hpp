#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace sepmp {

// Kahan-Babuska compensated accumulator; order-insensitive to within a few ulp.
class KahanSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct MCEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t n = 0;
    std::pair<double, double> ci95() const {
        return {mean - 1.96 * stderr_, mean + 1.96 * stderr_};
    }
};

// Reduce a vector of per-path values in index order (deterministic under any
// worker count, since the vector is filled by path index).
inline MCEstimate reduce_mean(const std::vector<double>& xs) {
    MCEstimate e;
    e.n = xs.size();
    if (e.n == 0) return e;
    KahanSum s;
    for (double x : xs) s.add(x);
    e.mean = s.value() / static_cast<double>(e.n);
    if (e.n < 2) return e;
    KahanSum sq;
    for (double x : xs) {
        double d = x - e.mean;
        sq.add(d * d);
    }
    double var = sq.value() / static_cast<double>(e.n - 1);
    e.stderr_ = std::sqrt(var / static_cast<double>(e.n));
    return e;
}

// Sample variance together with its own standard error (via the fourth
// central moment), for moment-matching checks.
struct VarianceEstimate {
    double variance = 0.0;
    double stderr_ = 0.0;
};

inline VarianceEstimate reduce_variance(const std::vector<double>& xs) {
    VarianceEstimate v;
    std::size_t n = xs.size();
    if (n < 2) return v;
    MCEstimate m = reduce_mean(xs);
    KahanSum s2, s4;
    for (double x : xs) {
        double d = x - m.mean;
        s2.add(d * d);
        s4.add(d * d * d * d);
    }
    double nd = static_cast<double>(n);
    v.variance = s2.value() / (nd - 1.0);
    double m4 = s4.value() / nd;
    double var_of_var = (m4 - v.variance * v.variance * (nd - 3.0) / (nd - 1.0)) / nd;
    v.stderr_ = std::sqrt(std::max(var_of_var, 0.0));
    return v;
}

}  // namespace sepmp
