#pragma once

#include <cstdint>
#include <vector>

namespace nbf {

// SplitMix64 step: full-period mixing of a 64-bit state. Used both as a
// bit finalizer and to expand seeds into generator state.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Deterministic child-seed derivation, used to key replications,
// permutations and grid cells off one master seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
    return mix64(base ^ (tag * 0xD1B54A32D192ED03ULL + 0x8BB84B93962EACC9ULL));
}

// xoshiro256++ with cheap splitmix-based seeding. Construction is a handful
// of integer mixes, so creating one stream per replication or permutation
// is affordable; distinct (seed, stream) pairs give independent sequences.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0) {
        std::uint64_t z = derive_seed(seed, ~stream);
        for (auto& w : s_) w = (z = mix64(z));
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 0x9E3779B97F4A7C15ULL;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on the open interval (0,1): 2^53 equally spaced midpoints,
    // never exactly 0 or 1 (safe for log() and quantile transforms).
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Unbiased integer in [0, n) via Lemire's multiply-shift rejection.
    std::uint32_t next_below(std::uint32_t n) {
        std::uint64_t x = next_u64() >> 32;
        std::uint64_t m = x * n;
        auto low = static_cast<std::uint32_t>(m);
        if (low < n) {
            const std::uint32_t t = (0u - n) % n;
            while (low < t) {
                x = next_u64() >> 32;
                m = x * n;
                low = static_cast<std::uint32_t>(m);
            }
        }
        return static_cast<std::uint32_t>(m >> 32);
    }

    // Fisher-Yates shuffle.
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::uint32_t j = next_below(static_cast<std::uint32_t>(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4];
};

}  // namespace nbf
