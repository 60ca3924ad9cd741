#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace censearch {

/// Seedable 64-bit generator with deterministic splitting.
///
/// Every stochastic operation in the library takes an explicit Rng
/// handle; there is no hidden global state. `split(stream)` derives an
/// independent child generator from the parent seed and a stream index,
/// so parallel chains and parallel Monte-Carlo replications are
/// reproducible regardless of thread scheduling.
///
/// All sampling helpers are implemented on top of the raw 64-bit output
/// (never std::*_distribution), so a seed produces the same sequence on
/// every platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix(seed)) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform on {0, ..., bound} inclusive, unbiased via rejection.
    std::uint64_t uniform_below(std::uint64_t bound) {
        const std::uint64_t range = bound + 1;
        if (range == 0) return next_u64();  // bound == 2^64 - 1
        // Reject the top partial block of 2^64 so every residue is equally likely.
        const std::uint64_t excess =
            (std::numeric_limits<std::uint64_t>::max() % range + 1) % range;
        std::uint64_t x = next_u64();
        if (excess != 0) {
            const std::uint64_t limit = std::uint64_t(0) - excess;
            while (x >= limit) x = next_u64();
        }
        return x % range;
    }

    /// Uniform integer on {lo, ..., hi} inclusive.
    int uniform_range(int lo, int hi) {
        return lo + static_cast<int>(uniform_below(static_cast<std::uint64_t>(hi - lo)));
    }

    /// Strictly positive unit-exponential variate.
    double exponential() {
        // Midpoint offset keeps u in (0,1), so the result is never 0 or inf.
        const double u = (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
        return -std::log(u);
    }

    /// Child generator for stream `stream`; deterministic in (seed, stream).
    Rng split(std::uint64_t stream) const {
        return Rng(mix(seed_ + (stream + 1) * 0x9E3779B97F4A7C15ULL));
    }

  private:
    // SplitMix64 finalizer; decorrelates nearby seeds before they reach
    // the mt19937_64 single-word initializer.
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace censearch
