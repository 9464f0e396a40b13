#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace sepmp {

// Counter-based random stream. Each stream is identified by a 64-bit key
// derived from (master_seed, path_index, substream_id); the i-th output is a
// stateless mix of (key, i), so streams can be created and consumed in any
// order without touching shared state.
//
// The mix is the SplitMix64 finalizer applied twice with distinct Weyl
// constants, which passes BigCrush-level smoke tests at this output width.
class RngStream {
public:
    RngStream() = default;
    explicit RngStream(std::uint64_t key) : key_(key) {}

    // Hierarchical derivation: master -> path -> substream (-> inner branch).
    static RngStream derive(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
        std::uint64_t k = mix(master + 0x9e3779b97f4a7c15ULL);
        k = mix(k ^ mix(a + 0xbf58476d1ce4e5b9ULL));
        k = mix(k ^ mix(b + 0x94d049bb133111ebULL));
        return RngStream(k);
    }
    static RngStream derive(std::uint64_t master, std::uint64_t a, std::uint64_t b,
                            std::uint64_t c) {
        RngStream s = derive(master, a, b);
        return RngStream(mix(s.key_ ^ mix(c + 0xd6e8feb86659fd93ULL)));
    }

    std::uint64_t next_u64() { return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

    // Uniform on (0,1), never exactly 0 or 1.
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Box-Muller; consumes two uniforms per call, no caching, so the draw
    // count per call is fixed and streams stay alignment-free.
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

// Fixed substream ids per path; keeps candidate times, marks and Brownian
// increments on disjoint streams so refining one never shifts another.
enum class Substream : std::uint64_t {
    EventCandidates = 0,
    Marks = 1,
    Brownian = 2,
    InnerBranch = 3,
};

struct PathStreams {
    RngStream candidates;
    RngStream marks;
    RngStream brownian;

    static PathStreams derive(std::uint64_t master, std::uint64_t path_index) {
        return {
            RngStream::derive(master, path_index,
                              static_cast<std::uint64_t>(Substream::EventCandidates)),
            RngStream::derive(master, path_index,
                              static_cast<std::uint64_t>(Substream::Marks)),
            RngStream::derive(master, path_index,
                              static_cast<std::uint64_t>(Substream::Brownian)),
        };
    }

    // Fresh streams for an inner branch of a nested estimator.
    static PathStreams derive_inner(std::uint64_t master, std::uint64_t outer_index,
                                    std::uint64_t inner_index) {
        auto key = [&](Substream s) {
            return RngStream::derive(master, outer_index,
                                     static_cast<std::uint64_t>(Substream::InnerBranch),
                                     (inner_index << 2) | static_cast<std::uint64_t>(s));
        };
        return {key(Substream::EventCandidates), key(Substream::Marks),
                key(Substream::Brownian)};
    }
};

}  // namespace sepmp
