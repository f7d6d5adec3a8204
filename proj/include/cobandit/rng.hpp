#pragma once

#include <cstdint>

// Deterministic, portable random primitives. All randomness in the simulator
// goes through these mixers so that replays are bit-identical across builds;
// std:: distributions are implementation-defined and are not used anywhere.

namespace cobandit {

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Keyed combination: order-sensitive, so derive_seed(a,b) != derive_seed(b,a).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return mix64(base ^ (0x632be59bd9b4e019ULL + (stream << 1)));
}

inline double u64_to_unit(std::uint64_t x) {
    // 53 high bits -> [0,1)
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

// Sequential splitmix64 stream.
class SplitMix {
public:
    explicit SplitMix(std::uint64_t seed = 0) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double next_unit() { return u64_to_unit(next()); }

    // Uniform integer in [0, n). Lemire multiply-shift; bias is < 2^-64 per
    // draw and identical on every platform, which is what matters here.
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    // Uniform integer in [lo, hi] inclusive.
    std::int64_t next_range(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(
                        next_below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

private:
    std::uint64_t state_;
};

// Stateless counter-based draw: the p-th value of stream (seed, key).
inline double counter_unit(std::uint64_t seed, std::uint64_t key, std::uint64_t counter) {
    return u64_to_unit(mix64(seed ^ mix64(key + 0x100000001b3ULL) ^
                             mix64(counter + 0xcbf29ce484222325ULL)));
}

} // namespace cobandit
