#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace sinrsched {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// FNV-1a, used only to turn a stream name into seed material.
inline std::uint64_t hash_name(std::string_view name) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : name) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

/// Named random stream. Streams derived from the same base seed but with
/// different names are statistically independent, so e.g. the arrival process
/// and the protocol coin flips never perturb each other.
///
/// Only the raw mt19937_64 output is used (its sequence is fixed by the
/// standard); the real-valued draws are done here instead of through
/// <random> distributions so results are identical across standard libraries.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::string_view name)
        : engine_(splitmix64(seed ^ splitmix64(hash_name(name)))) {}

    /// Child stream; does not advance this stream.
    RngStream split(std::string_view name) const {
        return RngStream(engine_seed_material() ^ hash_name(name), name);
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) {
        if (p <= 0.0) return false;
        if (p >= 1.0) return true;
        return uniform() < p;
    }

private:
    std::uint64_t engine_seed_material() const {
        auto copy = engine_;
        return copy();
    }

    std::mt19937_64 engine_;
};

}  // namespace sinrsched
