// Portable pseudo-random number generation.
//
// All stochastic code in this library draws from xoshiro256++ seeded through
// SplitMix64, with explicit uint64 -> double conversions. The exact streams
// are part of the library contract: the same seed yields bit-identical draws
// on every platform, which keeps generated instances and benchmark tables
// reproducible across languages and machines.

#ifndef FHSAP_RNG_HPP
#define FHSAP_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>

namespace fhsap {

// SplitMix64 (Steele, Lea, Vigna). Used to expand seeds and to derive
// per-stream seeds.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
};

// xoshiro256++ (Blackman, Vigna 2019). State is seeded from four successive
// SplitMix64 outputs of the 64-bit seed.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& w : state_) w = sm.next();
    }

    std::uint64_t next_u64() {
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

    // Uniform on [0, 1): top 53 bits scaled by 2^-53.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on [a, b).
    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // Standard exponential via inversion; log1p keeps the tail exact.
    double exponential() { return -std::log1p(-uniform01()); }

    // Standard normal, Box-Muller cosine branch. Consumes two uniforms per
    // draw; the sine companion is discarded to keep the stream simple.
    double normal() {
        const double u1 = 1.0 - uniform01();  // (0, 1]
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    // Standard lognormal: exp(N(0,1)).
    double lognormal() { return std::exp(normal()); }

    // Integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> state_;
};

// Seed-splitting rule for independent sub-streams (rounding trials, bench
// rows): stream t uses the (t+1)-th output of SplitMix64 seeded with the
// master seed. SplitMix64 advances its state additively, so the t-th output
// is available in O(1).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    SplitMix64 sm(master + stream * 0x9E3779B97F4A7C15ULL);
    return sm.next();
}

}  // namespace fhsap

#endif  // FHSAP_RNG_HPP
