#ifndef CAUSALBENCH_CORE_RNG_HPP
#define CAUSALBENCH_CORE_RNG_HPP

#include <array>
#include <cstdint>

namespace causalbench {

// SplitMix64 avalanche finalizer (Steele/Lea/Vigna constants).
inline std::uint64_t splitmix64_avalanche(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Derives the per-experiment seed from (base_seed, block_index, rep_index).
// Each word is folded in through a SplitMix64 avalanche so that nearby
// indices land far apart in seed space. The derivation depends only on the
// three inputs, never on scheduling, so serial and parallel runs agree.
std::uint64_t mix64(std::uint64_t base_seed,
                    std::uint64_t block_index,
                    std::uint64_t rep_index);

// xoshiro256++ (Blackman & Vigna), seeded through SplitMix64. Period
// 2^256 - 1. Uniform doubles take the top 53 bits; normal deviates use the
// Box-Muller transform with the second deviate cached.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01();

    // One Bernoulli(p) draw; consumes exactly one uniform.
    bool bernoulli(double p);

    // N(mean, sd^2) via Box-Muller; every second call is served from the
    // cached pair member and consumes no stream output.
    double normal(double mean = 0.0, double sd = 1.0);

private:
    std::array<std::uint64_t, 4> state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace causalbench

#endif
