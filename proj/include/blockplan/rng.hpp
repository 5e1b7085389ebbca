#pragma once

#include <cmath>
#include <cstdint>

namespace blockplan {

// splitmix64 finalizer. Used both as the generator step and to derive
// decorrelated child seeds from (seed, stream-tag) pairs.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return mix64(seed ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

// Small counter-based generator: the output sequence is a pure function of
// the seed, so any (seed, index) fan-out is order-independent. The seed is
// scrambled into the starting counter; nearby seeds (e.g. seed^trial fan-outs)
// would otherwise walk overlapping windows of the same master sequence.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(mix64(seed ^ 0xd1342543de82ef95ULL)) {}

    std::uint64_t next_u64() { return mix64(state_++); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    std::uint64_t uniform_index(std::uint64_t n) {
        // Modulo bias is < 2^-40 for the n used here (participants, blocks).
        return n == 0 ? 0 : next_u64() % n;
    }

    // Box-Muller; consumes two uniforms per draw.
    double normal(double mean, double stddev) {
        double u1 = 0.0;
        do {
            u1 = uniform01();
        } while (u1 <= 0.0);
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(2.0 * M_PI * u2);
    }

private:
    std::uint64_t state_;
};

double normal_cdf(double x);
// Inverse standard normal CDF (Acklam's rational approximation plus one
// Halley refinement; accurate to ~1e-15 over (0, 1)).
double normal_quantile(double p);

}  // namespace blockplan
