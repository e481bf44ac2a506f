#include "core/rng.hpp"

#include <cmath>

namespace causalbench {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace

std::uint64_t mix64(std::uint64_t base_seed,
                    std::uint64_t block_index,
                    std::uint64_t rep_index) {
    std::uint64_t z = splitmix64_avalanche(base_seed + kGolden);
    z = splitmix64_avalanche(z ^ (block_index * 0xBF58476D1CE4E5B9ULL + kGolden));
    z = splitmix64_avalanche(z ^ (rep_index * 0x94D049BB133111EBULL + kGolden));
    return z;
}

Rng::Rng(std::uint64_t seed) {
    // SplitMix64 stream expansion; guarantees a nonzero xoshiro state.
    std::uint64_t s = seed;
    for (auto& word : state_) {
        s += kGolden;
        word = splitmix64_avalanche(s);
    }
    if (state_[0] == 0 && state_[1] == 0 && state_[2] == 0 && state_[3] == 0) {
        state_[0] = kGolden;
    }
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double Rng::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

bool Rng::bernoulli(double p) {
    return uniform01() < p;
}

double Rng::normal(double mean, double sd) {
    if (has_spare_) {
        has_spare_ = false;
        return mean + sd * spare_;
    }
    double u1 = uniform01();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return mean + sd * r * std::cos(theta);
}

}  // namespace causalbench
