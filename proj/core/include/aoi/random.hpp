#pragma once

#include <cstdint>
#include <random>

namespace aoi {

// Seedable deterministic uniform stream. Variates are produced from the raw
// 64-bit engine output rather than std::uniform_real_distribution so that a
// given seed yields the same sequence on every platform.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    // Uniform draw in the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    std::uint64_t next_raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

// splitmix64 finalizer; used to derive independent stream seeds from one
// user-facing seed.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream_id) {
    return mix_seed(seed ^ mix_seed(stream_id));
}

}  // namespace aoi
