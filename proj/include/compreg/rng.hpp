#pragma once

#include <cstdint>

#include "compreg/types.hpp"

namespace compreg {

/// Counter-style 64-bit generator (splitmix64). Output is identical across
/// platforms for a fixed seed, which is what makes runs reproducible.
struct SplitMix64 {
    std::uint64_t state = 0;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in (0, 1].
    double next_unit() {
        return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    }
};

/// Derive an independent sub-stream seed. All sub-seeds in the project flow
/// from one user seed through this splitting.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 rng(seed ^ (0xA0761D6478BD642Full * (stream + 1)));
    return rng.next();
}

/// Standard normal samples via Box-Muller over SplitMix64.
class GaussianSampler {
public:
    explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = rng_.next_unit();
        const double u2 = rng_.next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    DenseVector vector(std::size_t n) {
        DenseVector v(n);
        for (double& x : v) x = next();
        return v;
    }

private:
    SplitMix64 rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace compreg
