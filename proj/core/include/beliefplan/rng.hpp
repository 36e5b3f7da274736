#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace beliefplan {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30u)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27u)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31u);
}

/// Seeded pseudo-random stream. All sampling goes through explicit
/// helpers built on the raw 64-bit output so that results are
/// reproducible across standard library implementations (the
/// std::*_distribution classes are not portable).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Independent per-task stream: hashing (master, index) makes the
    /// streams order-insensitive, so tasks can run concurrently without
    /// changing results.
    static Rng derive(std::uint64_t master, std::uint64_t index) {
        std::uint64_t s = master;
        splitmix64(s);
        s ^= 0x5851f42d4c957f2dull * (index + 1);
        return Rng(splitmix64(s));
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1), 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n). n must be positive.
    int uniform_int(int n) {
        return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n));
    }

    /// Index drawn proportionally to `weights` (nonnegative, positive sum).
    /// Floating-point slack in the total falls to the last positive entry.
    int categorical(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        double u = uniform01() * total;
        double acc = 0.0;
        int last_positive = 0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] <= 0.0) continue;
            last_positive = static_cast<int>(i);
            acc += weights[i];
            if (u < acc) return static_cast<int>(i);
        }
        return last_positive;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace beliefplan
