#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace graphwatch {

// Counter-based SplitMix64 stream. The whole state is one 64-bit word, so
// streams are cheap to copy, serialize and split. Substreams are derived by
// remixing (origin seed, key) rather than by consuming draws, which keeps
// day-level streams independent of how much of the parent was used.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Inclusive on both ends. Modulo bias is below 2^-50 for the ranges used here.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(next_u64() % span);
    }

    // Box-Muller without caching the second variate; two draws per call.
    double normal(double mu = 0.0, double sigma = 1.0) {
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mu + sigma * r * std::cos(2.0 * M_PI * u2);
    }

    double lognormal(double mu, double sigma) { return std::exp(normal(mu, sigma)); }

    // Independent substream keyed off this stream's origin. Never advances the
    // parent, so split(k) is a pure function of (seed at construction, k).
    Rng split(std::uint64_t key) const {
        std::uint64_t z = origin_ ^ (0xD1B54A32D192ED03ULL + key * 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 31)) * 0xFF51AFD7ED558CCDULL;
        z = (z ^ (z >> 33)) * 0xC4CEB9FE1A85EC53ULL;
        return Rng(z ^ (z >> 33), z);
    }

    Rng split(std::uint64_t key_a, std::uint64_t key_b) const {
        return split(key_a).split(key_b);
    }

    std::uint64_t state() const { return state_; }
    void set_state(std::uint64_t s) { state_ = s; }

private:
    Rng(std::uint64_t state, std::uint64_t origin) : state_(state), origin_(origin) {}

    std::uint64_t state_;
    std::uint64_t origin_ = state_;
};

}  // namespace graphwatch
