#pragma once

#include <cstdint>
#include <random>

namespace harvest {

/// Deterministic uniform stream. std::mt19937_64 output is fully specified by
/// the standard; the [0,1) mapping is done by hand because the standard
/// distributions are implementation-defined and would break byte-stable CSV
/// output across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1), 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Unit-mean exponential draw (the |h_RF|^2 law of Rayleigh fading).
    double exponential() {
        double u = uniform();
        while (u <= 0.0) u = uniform();
        return -std::log(u);
    }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

/// splitmix64 finalizer; decorrelates seed,stream pairs so parallel workers
/// can draw from independent streams derived from one scenario seed.
inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace harvest
