#pragma once

#include <cstdint>
#include <stdexcept>

#include <gmpxx.h>

namespace zdet {

/// Deterministic 64-bit generator (xoshiro256** seeded through splitmix64).
///
/// Every randomized routine in the library takes a seed or an Rng explicitly,
/// so a run is reproducible from one integer across platforms and compilers.
/// std::uniform_int_distribution is avoided on purpose: its output is not
/// specified portably.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : root_(seed) {
        std::uint64_t x = seed;
        for (auto& word : state_) word = splitmix(x);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform on [0, bound) by masked rejection; bound > 0.
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("Rng::below: zero bound");
        if ((bound & (bound - 1)) == 0) return next() & (bound - 1);
        const std::uint64_t mask = mask_for(bound);
        for (;;) {
            const std::uint64_t v = next() & mask;
            if (v < bound) return v;
        }
    }

    /// Uniform on [0, bound) for arbitrary-precision bounds.
    mpz_class below(const mpz_class& bound) {
        if (bound <= 0) throw std::invalid_argument("Rng::below: nonpositive bound");
        if (bound.fits_ulong_p()) return mpz_class(below(std::uint64_t(bound.get_ui())));
        const std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
        const std::size_t words = (bits + 63) / 64;
        const std::uint64_t top_mask = (bits % 64) ? ((std::uint64_t(1) << (bits % 64)) - 1) : ~std::uint64_t(0);
        mpz_class v;
        for (;;) {
            v = 0;
            for (std::size_t w = 0; w < words; ++w) {
                std::uint64_t word = next();
                if (w == 0) word &= top_mask;
                v <<= 64;
                v += mpz_class(word);
            }
            if (v < bound) return v;
        }
    }

    /// Uniform over the lambda+1 integers {-floor(lambda/2), ..., ceil(lambda/2)}.
    long entry_set(std::uint64_t lambda) {
        return long(below(lambda + 1)) - long(lambda / 2);
    }

    /// Uniform over a set of exactly `size` contiguous integers centered at 0:
    /// {-floor(size/2), ..., ceil(size/2)-1}.
    mpz_class contiguous_set(const mpz_class& size) {
        return below(size) - size / 2;
    }

    /// Independent child stream; stable under the parent's draw history.
    Rng fork(std::uint64_t salt) const {
        std::uint64_t x = root_ ^ (0x9E3779B97F4A7C15ULL * (salt + 1));
        return Rng(splitmix(x));
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    static std::uint64_t splitmix(std::uint64_t& x) {
        std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t mask_for(std::uint64_t bound) {
        std::uint64_t mask = bound - 1;
        mask |= mask >> 1;
        mask |= mask >> 2;
        mask |= mask >> 4;
        mask |= mask >> 8;
        mask |= mask >> 16;
        mask |= mask >> 32;
        return mask;
    }

    std::uint64_t root_;
    std::uint64_t state_[4];
};

}  // namespace zdet
