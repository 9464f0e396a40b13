#include "sepmp/martingale.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sepmp/errors.hpp"
#include "sepmp/report.hpp"

namespace sepmp {

double marker_value(const EventPath& path, MarkerKind kind, double s) {
    if (!(s > path.start_time)) {
        throw std::out_of_range("marker_value: markers are defined on (start, horizon]");
    }
    if (s > path.horizon + 1e-12) {
        throw std::out_of_range("marker_value: s past horizon");
    }
    std::size_t seg = path.segment_at(s);
    double y = seg < path.marks.size() ? path.marks[seg] : path.pending_mark;
    return kind == MarkerKind::Linear ? y : y * y;
}

double CompensatedPair::raw(double t) const {
    return kind == MarkerKind::Linear ? jump_process_value(*path, t)
                                      : quadratic_variation_of_U(*path, t);
}

double CompensatedPair::compensator(double t) const {
    if (t < path->start_time || t > path->horizon + 1e-12) {
        throw std::out_of_range("compensator: t outside path range");
    }
    const auto& p = *path;
    KahanSum acc;
    double seg_start = p.start_time;
    double lam_start = p.lambda_initial;
    for (std::size_t i = 0; i <= p.times.size(); ++i) {
        double seg_end = i < p.times.size() ? p.times[i] : p.horizon;
        double hi = std::min(seg_end, t);
        if (hi > seg_start) {
            double y = i < p.marks.size() ? p.marks[i] : p.pending_mark;
            double marker = kind == MarkerKind::Linear ? y : y * y;
            acc.add(marker * p.model.flow_integral(lam_start, seg_start, seg_start, hi));
        }
        if (seg_end >= t) break;
        seg_start = seg_end;
        lam_start = p.lambda_post[i];
    }
    return acc.value();
}

CompensatedPair build_compensated(const EventPath& path, MarkerKind kind,
                                  bool allow_atjump, double compensator_scale) {
    if (path.mark_mode == MarkMode::AtJump && !allow_atjump) {
        throw ModeError(
            "build_compensated: path simulated in AtJump mode; the martingale "
            "property is only claimed in Predictable mode (override to experiment)");
    }
    CompensatedPair pair;
    pair.path = &path;
    pair.kind = kind;
    pair.scale = compensator_scale;
    return pair;
}

bool TestReport::all_pass() const {
    for (const auto& r : records) {
        if (!r.pass) return false;
    }
    return true;
}

std::string TestReport::serialize() const {
    std::ostringstream os;
    os << "# martingale test report\n";
    os << "# threshold |z| <= 3 per test; familywise rate <= " << records.size()
       << " x 0.27% (Bonferroni)\n";
    for (const auto& r : records) {
        os << "test_id=" << r.test_id << " s=" << format_double(r.s)
           << " t=" << format_double(r.t) << " witness=" << r.witness
           << " estimate=" << format_double(r.estimate)
           << " stderr=" << format_double(r.stderr_) << " z=" << format_double(r.z)
           << " pass=" << (r.pass ? "true" : "false") << "\n";
    }
    return os.str();
}

namespace {
double witness_value(const EventPath& path, const std::string& name, double s) {
    if (name == "1") return 1.0;
    if (name == "N") return static_cast<double>(path.count_at(s));
    if (name == "lambda") return path.intensity_at(s);
    if (name == "U") return jump_process_value(path, s);
    throw ConfigError("unknown witness '" + name + "'");
}
}  // namespace

TestReport martingale_test(const std::vector<CompensatedPair>& ensemble,
                           const std::vector<double>& checkpoints,
                           const std::vector<std::string>& witnesses,
                           const std::string& test_id) {
    if (ensemble.size() < 10000) {
        throw ConfigError("martingale_test: needs >= 10^4 paths, got " +
                          std::to_string(ensemble.size()));
    }
    TestReport report;
    for (std::size_t c = 0; c + 1 < checkpoints.size(); ++c) {
        double s = checkpoints[c];
        double t = checkpoints[c + 1];
        for (const auto& w : witnesses) {
            std::vector<double> samples(ensemble.size());
            for (std::size_t i = 0; i < ensemble.size(); ++i) {
                const auto& pair = ensemble[i];
                double dm = pair.martingale(t) - pair.martingale(s);
                samples[i] = dm * witness_value(*pair.path, w, s);
            }
            MCEstimate e = reduce_mean(samples);
            MartingaleTestRecord rec;
            rec.test_id = test_id;
            rec.s = s;
            rec.t = t;
            rec.witness = w;
            rec.estimate = e.mean;
            rec.stderr_ = e.stderr_;
            rec.z = e.stderr_ > 0.0 ? e.mean / e.stderr_ : 0.0;
            rec.pass = std::abs(rec.z) <= 3.0;
            report.records.push_back(rec);
        }
    }
    return report;
}

double realized_covariation(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) {
        throw ConfigError("realized_covariation: grids differ in length");
    }
    KahanSum acc;
    for (std::size_t k = 0; k + 1 < a.size(); ++k) {
        acc.add((a[k + 1] - a[k]) * (b[k + 1] - b[k]));
    }
    return acc.value();
}

}  // namespace sepmp
