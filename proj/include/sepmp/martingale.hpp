#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sepmp/events.hpp"
#include "sepmp/summation.hpp"

namespace sepmp {

// Left-continuous marker processes: the Linear marker carries the mark of the
// current segment (Y_i on (T_{i−1}, T_i], the pending mark past the last
// event); Squared is its pointwise square.
enum class MarkerKind { Linear, Squared };

// Marker value at s ∈ (0, horizon]; left-continuous, so at an event time T_i
// the value is Y_i (the mark of the segment ending there).
double marker_value(const EventPath& path, MarkerKind kind, double s);

// U_t (or [U]_t), its compensator ∫₀ᵗ marker·λ ds, and their difference.
// The compensator includes the partial segment past the last event, using
// the pending mark, so the pair is centered between events as well.
struct CompensatedPair {
    const EventPath* path = nullptr;
    MarkerKind kind = MarkerKind::Linear;
    double scale = 1.0;  // compensator multiplier; != 1 only in corruption experiments

    double raw(double t) const;
    double compensator(double t) const;
    double martingale(double t) const { return raw(t) - scale * compensator(t); }
};

// Builds the compensated pair. Requires Predictable mark mode (only there is
// the martingale property claimed); pass allow_atjump=true to run the
// contrast experiment anyway. compensator_scale != 1 deliberately corrupts
// the compensator for negative-control tests.
CompensatedPair build_compensated(const EventPath& path, MarkerKind kind,
                                  bool allow_atjump = false,
                                  double compensator_scale = 1.0);

struct MartingaleTestRecord {
    std::string test_id;
    double s = 0.0;
    double t = 0.0;
    std::string witness;
    double estimate = 0.0;
    double stderr_ = 0.0;
    double z = 0.0;
    bool pass = false;
};

struct TestReport {
    std::vector<MartingaleTestRecord> records;
    bool all_pass() const;
    std::string serialize() const;  // key-value text, one record per block
};

// Orthogonality test of martingale increments against adapted witnesses:
// for consecutive checkpoints s < t and witness g evaluated at s, the
// studentized mean of (M_t − M_s)·g_s must satisfy |z| <= 3. Witness names:
// "1", "N", "lambda", "U". Threshold is per-test (3σ); with m tests the
// familywise rate is at most m·0.27% (Bonferroni), noted in the report.
TestReport martingale_test(const std::vector<CompensatedPair>& ensemble,
                           const std::vector<double>& checkpoints,
                           const std::vector<std::string>& witnesses,
                           const std::string& test_id);

// Realized covariation Σ Δa·Δb over shared grid increments.
double realized_covariation(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace sepmp
