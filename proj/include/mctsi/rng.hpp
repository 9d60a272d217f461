#ifndef MCTSI_RNG_HPP
#define MCTSI_RNG_HPP

#include <cstdint>
#include <span>

#include "mctsi/errors.hpp"

namespace mctsi {

// Counter-free SplitMix64 stream. Cheap to construct, so every independent
// task (trial, model draw, perturbation) gets its own stream derived from
// (master_seed, stream_id) and results never depend on scheduling order.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Deterministic child-stream seed; chain for nested ids:
    // derive(derive(master, trial), edge).
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream_id) {
        return mix(seed ^ mix(stream_id ^ 0x6a09e667f3bcc909ull));
    }

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, bound) without modulo bias.
    std::uint64_t next_below(std::uint64_t bound) {
        if (bound == 0) throw PreconditionError("next_below: bound must be positive");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t v = next_u64();
        while (v >= limit) v = next_u64();
        return v % bound;
    }

    // CDF inversion; the final category absorbs rounding slack so a
    // normalized pmf can never fall through.
    int next_categorical(std::span<const double> pmf) {
        const double u = next_double();
        double cum = 0.0;
        for (std::size_t i = 0; i + 1 < pmf.size(); ++i) {
            cum += pmf[i];
            if (u < cum) return static_cast<int>(i);
        }
        return static_cast<int>(pmf.size()) - 1;
    }

  private:
    std::uint64_t state_;
};

}  // namespace mctsi

#endif
