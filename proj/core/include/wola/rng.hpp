#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace wola {

/// Deterministic pseudo-random stream (xoshiro256++ core, hand-rolled
/// distributions). The standard library distributions are not used because
/// their output is implementation-defined; every draw here is reproducible
/// bit-for-bit across platforms and compilers.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    /// Uniform double in [0, 1), 53 usable mantissa bits.
    double uniform();

    /// Uniform integer in [0, bound). bound must be >= 1.
    std::uint64_t bounded(std::uint64_t bound);

    /// Standard normal via Box-Muller (no cached second value, so the
    /// stream position never depends on call history).
    double normal();

    /// Gamma(alpha, 1) via Marsaglia-Tsang, with the alpha < 1 boost.
    double gamma(double alpha);

    /// Dirichlet(alpha, ..., alpha) over `dim` categories.
    std::vector<double> dirichlet_symmetric(double alpha, std::size_t dim);

    /// In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(bounded(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_[4];
};

/// Seed-splitting rule used throughout the project: a substream is
/// identified by (master seed, component name, index). The same triple
/// always yields the same stream, independent of creation order, which is
/// what makes intra-round parallelism replay-safe.
///
/// stream_seed = splitmix(splitmix(master) ^ fnv1a(component) ^ splitmix(index))
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view component,
                          std::uint64_t index = 0);

/// Convenience: Rng(derive_seed(...)).
Rng make_stream(std::uint64_t master_seed, std::string_view component,
                std::uint64_t index = 0);

}  // namespace wola
