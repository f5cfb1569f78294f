#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace tactile {

// Deterministic random source. std::mt19937_64 supplies the bits, but the
// distributions are hand-rolled: the standard library's distribution
// implementations differ between standard libraries, and reproducibility of
// seeded runs matters more here than sampling speed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    // Box-Muller without caching the second deviate, so the draw count per
    // call is always one pair of uniforms.
    double gaussian(double mean, double sd) {
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        return mean + sd * r * std::cos(2.0 * M_PI * u2);
    }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(uniform01() * static_cast<double>(n)) % n;
    }

private:
    std::mt19937_64 engine_;
};

// Stable sub-seed derivation so independent phases of a pipeline get
// decorrelated streams from one master seed. FNV-1a over the tag, then a
// splitmix64 finalizer.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t index = 0) {
    std::uint64_t h = 1469598103934665603ull;
    for (char c : tag) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 1099511628211ull;
    }
    h ^= master + 0x9e3779b97f4a7c15ull + (index << 1);
    h += 0x9e3779b97f4a7c15ull;
    h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ull;
    h = (h ^ (h >> 27)) * 0x94d049bb133111ebull;
    return h ^ (h >> 31);
}

} // namespace tactile
