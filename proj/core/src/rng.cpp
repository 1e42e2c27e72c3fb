#include "wola/rng.hpp"

#include <cmath>
#include <numbers>

#include "wola/error.hpp"

namespace wola {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) {
    // Expand the seed into four non-zero words.
    std::uint64_t s = seed;
    for (auto& w : state_) w = splitmix64(s);
}

std::uint64_t Rng::next_u64() {
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

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::bounded(std::uint64_t bound) {
    if (bound == 0) throw invalid_input("Rng::bounded: bound must be >= 1");
    // Debiased multiply-shift (Lemire).
    std::uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * bound;
    std::uint64_t lo = static_cast<std::uint64_t>(m);
    if (lo < bound) {
        std::uint64_t threshold = (0 - bound) % bound;
        while (lo < threshold) {
            x = next_u64();
            m = static_cast<__uint128_t>(x) * bound;
            lo = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

double Rng::normal() {
    // u1 in (0, 1] keeps the log finite.
    double u1 = 1.0 - uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::gamma(double alpha) {
    if (!(alpha > 0.0)) throw invalid_input("Rng::gamma: alpha must be positive");
    if (alpha < 1.0) {
        // Boost: Gamma(a) = Gamma(a+1) * U^(1/a).
        double u = 1.0 - uniform();
        return gamma(alpha + 1.0) * std::pow(u, 1.0 / alpha);
    }
    const double d = alpha - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = normal();
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        double u = 1.0 - uniform();
        if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
            return d * v;
        }
    }
}

std::vector<double> Rng::dirichlet_symmetric(double alpha, std::size_t dim) {
    if (dim == 0) throw invalid_input("dirichlet_symmetric: dim must be >= 1");
    std::vector<double> draw(dim);
    for (;;) {
        double sum = 0.0;
        for (auto& g : draw) {
            g = gamma(alpha);
            sum += g;
        }
        if (sum > 0.0) {  // guards against total underflow at tiny alpha
            for (auto& g : draw) g /= sum;
            return draw;
        }
    }
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view component,
                          std::uint64_t index) {
    std::uint64_t a = master_seed;
    std::uint64_t b = index;
    return splitmix64(a) ^ fnv1a(component) ^ splitmix64(b);
}

Rng make_stream(std::uint64_t master_seed, std::string_view component, std::uint64_t index) {
    return Rng(derive_seed(master_seed, component, index));
}

}  // namespace wola
