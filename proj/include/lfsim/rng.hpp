#pragma once

#include <cmath>
#include <cstdint>

namespace lfsim {

// Deterministic PRNG with fully specified output streams. The standard
// <random> distributions are implementation-defined, which would break the
// byte-identical-output contract across toolchains, so the few draws we need
// are spelled out here on top of a splitmix64 core.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Inclusive integer range.
    int uniform_int(int lo, int hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1ull;
        return lo + static_cast<int>(next_u64() % span);
    }

    // Box-Muller; draws two uniforms per call.
    double normal(double mean, double sigma) {
        double u1 = uniform01();
        double u2 = uniform01();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + sigma * r * std::cos(6.283185307179586476925286766559 * u2);
    }

    // Derives an independent stream seed from a master seed and tags.
    static std::uint64_t derive(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
        Rng mix(master);
        mix.state_ ^= 0x6a09e667f3bcc908ull + a * 0x9e3779b97f4a7c15ull;
        mix.next_u64();
        mix.state_ ^= 0xbb67ae8584caa73bull + b * 0xc2b2ae3d27d4eb4full;
        mix.next_u64();
        return mix.state_;
    }

private:
    std::uint64_t state_;
};

}  // namespace lfsim
