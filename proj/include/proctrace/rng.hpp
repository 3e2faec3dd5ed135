#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace proctrace {

// splitmix64 step, used to derive independent sub-seeds from one master seed.
inline std::uint64_t mix_seed(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a) {
    return mix_seed(seed ^ mix_seed(a));
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return mix_seed(mix_seed(seed, a), b);
}

// Seedable generator built on std::mt19937_64 (the engine itself is fully
// specified by the standard, so streams are identical across platforms).
// Distribution helpers are hand-rolled because the std distributions are
// implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [lo, hi] inclusive, by rejection sampling.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
        if (range == 0) return static_cast<std::int64_t>(next_u64());  // full range
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return lo + static_cast<std::int64_t>(v % range);
    }

    // Standard normal via Box-Muller.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1, u2;
        do {
            u1 = uniform01();
        } while (u1 <= 0.0);
        u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    // Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i) - 1));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace proctrace
