#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace plausible {

// Portable seeded generator. std::mt19937_64's output sequence is fixed by the
// standard; the distributions below are written out by hand because the
// standard library's are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do { x = engine_(); } while (x >= limit);
        return x % n;
    }

private:
    std::mt19937_64 engine_;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Sub-seed for one pipeline component, so each stage draws from its own stream.
enum class Stream : std::uint64_t {
    Mobility = 1,
    ScanPhases = 2,
    Randomize = 3,
    InitialPositions = 4,
    EventDeletion = 5,
};

inline std::uint64_t derive_seed(std::uint64_t seed, Stream stream) {
    return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(stream)));
}

}  // namespace plausible
