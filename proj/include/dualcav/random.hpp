#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace dualcav {

/// splitmix64: used both as a stream-seeding mixer and as the uniform source.
/// Hand-rolled so that seeded runs are bit-identical across standard libraries
/// and platforms (std::normal_distribution makes no such promise).
class SplitMix64 {
  public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform in (0, 1]: never returns 0, safe under log().
    double next_open_unit() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Uniform in [0, 1).
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller.
    double next_gaussian() {
        const double u = next_open_unit();
        const double v = next_unit();
        return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
    }

    /// Circular complex Gaussian with E|z|^2 = 1.
    std::complex<double> next_complex_gaussian() {
        const double u = next_open_unit();
        const double v = next_unit();
        const double r = std::sqrt(-std::log(u));
        const double phi = 2.0 * std::numbers::pi * v;
        return {r * std::cos(phi), r * std::sin(phi)};
    }

  private:
    uint64_t state_;
};

/// Deterministic sub-stream derivation: the stream for (seed, realization,
/// stream_id) does not depend on evaluation order of other streams.
inline uint64_t derive_stream_seed(uint64_t seed, uint64_t realization, uint64_t stream_id) {
    SplitMix64 mix(seed ^ (0x853c49e6748fea9bull + realization * 0x9e3779b97f4a7c15ull));
    uint64_t s = mix.next_u64();
    SplitMix64 mix2(s ^ (stream_id * 0xda942042e4dd58b5ull + 0x2545f4914f6cdd1dull));
    return mix2.next_u64();
}

}  // namespace dualcav
