#pragma once

#include <cstdint>
#include <initializer_list>

namespace gridlab {

// SplitMix64 (Steele, Lea & Flood 2014). One 64-bit word of state, a fixed
// additive constant and an avalanching finalizer, so the same seed produces
// the same stream on every platform. Splitting hands out an independent
// generator seeded from the parent stream, which is how per-instance and
// per-episode streams are derived throughout the project.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Unbiased integer in [0, bound) via rejection sampling. bound must be > 0.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t threshold = (0ull - bound) % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool chance(double p) { return next_double() < p; }

    // Child generator with an independent stream.
    SplitMix64 split() { return SplitMix64(next_u64()); }

    // The SplitMix64 finalizer as a standalone mixing function.
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Deterministic seed derivation: fold a list of stream identifiers into a
    // base seed. Used to give (iteration, prompt, group) and similar tuples
    // reproducible independent streams.
    static std::uint64_t derive(std::uint64_t base, std::initializer_list<std::uint64_t> ids) {
        std::uint64_t s = base;
        for (std::uint64_t x : ids) s = mix(s + 0x9E3779B97F4A7C15ull + x);
        return s;
    }

    // FNV-1a over a string, for turning stream tags into identifiers.
    static std::uint64_t hash_tag(const char* tag) {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (const char* p = tag; *p; ++p) {
            h ^= static_cast<unsigned char>(*p);
            h *= 0x100000001b3ull;
        }
        return h;
    }

  private:
    std::uint64_t state_;
};

} // namespace gridlab
