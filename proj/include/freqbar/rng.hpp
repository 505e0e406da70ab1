#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace freqbar {

/// SplitMix64 finalizer. Good avalanche, cheap, and stable across builds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Deterministic substream generator (SplitMix64 core).
///
/// Substreams are keyed by (seed, purpose tag, up to three coordinates), so
/// draws depend only on what is being randomised and never on evaluation
/// order. Gaussian variates use Box-Muller on explicitly generated uniforms
/// instead of std::normal_distribution, whose draw sequence is
/// implementation-defined.
class SubstreamRng {
public:
    explicit SubstreamRng(std::uint64_t state) noexcept : state_(state) {}

    /// Derive an independent substream from (seed, tag, a, b, c).
    static SubstreamRng keyed(std::uint64_t seed, std::uint64_t tag, std::uint64_t a = 0,
                              std::uint64_t b = 0, std::uint64_t c = 0) noexcept {
        std::uint64_t s = mix64(seed ^ mix64(tag));
        s = mix64(s ^ mix64(a + 0x243F6A8885A308D3ull));
        s = mix64(s ^ mix64(b + 0x13198A2E03707344ull));
        s = mix64(s ^ mix64(c + 0xA4093822299F31D0ull));
        return SubstreamRng(s);
    }

    std::uint64_t next_u64() noexcept {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform byte in [0, 255]. 256 divides 2^64, so masking is bias-free.
    std::uint8_t next_byte() noexcept { return static_cast<std::uint8_t>(next_u64() & 0xFF); }

    /// Standard normal variate (Box-Muller, second value cached).
    double gaussian() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Purpose tags for substream derivation. Fixed values: they are part of the
/// reproducibility contract (same seed + same tag -> same stream, forever).
namespace rng_tag {
inline constexpr std::uint64_t kImageNoise = 0x01;  // add_noise, keyed (x, y, channel)
inline constexpr std::uint64_t kReadNoise = 0x02;   // per-MAC conductance reads, keyed (x, y, channel)
inline constexpr std::uint64_t kStandaloneMac = 0x03;  // single-MAC runs outside the pipeline
}  // namespace rng_tag

}  // namespace freqbar
