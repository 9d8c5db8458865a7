#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mfbm {

/// One splitmix64 step; the standard finalizer-quality mixer.
inline std::uint64_t splitmix64_next(std::uint64_t& state) noexcept {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Seed for an independent replication stream. Mixing (seed, index) through
/// splitmix64 decorrelates streams regardless of how the base seeds or
/// indices are spaced, so replication r is reproducible in isolation.
inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    std::uint64_t s = seed ^ (0xD1B54A32D192ED03ull * (index + 1));
    std::uint64_t a = splitmix64_next(s);
    std::uint64_t b = splitmix64_next(s);
    return a ^ (b << 1);
}

/// Standard-normal generator: mt19937_64 + Box-Muller on 53-bit uniforms.
/// Self-contained so that streams are bit-reproducible across platforms and
/// standard-library versions (std::normal_distribution is not portable).
class GaussianRng {
public:
    explicit GaussianRng(std::uint64_t seed) : eng_(seed) {}

    /// Uniform draw in (0, 1] with 53-bit resolution (never exactly 0).
    double uniform() {
        return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// How mixed-noise paths are sampled.
enum class SamplerMethod {
    cholesky_exact, ///< dense Cholesky of the fBm covariance; exact joint law
    spectral_fast,  ///< circulant embedding of fractional Gaussian noise (FFT)
};

struct SamplerConfig {
    std::uint64_t seed = 0;
    SamplerMethod method = SamplerMethod::spectral_fast;
    /// Largest diagonal jitter the Cholesky path may add before failing.
    double jitter_tol = 1e-12;
};

} // namespace mfbm
