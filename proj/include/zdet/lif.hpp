#pragma once

#include <cstdint>
#include <stdexcept>

#include <gmpxx.h>

#include "zdet/bounds.hpp"
#include "zdet/dixon.hpp"
#include "zdet/int_matrix.hpp"
#include "zdet/rng.hpp"

namespace zdet {

/// Parameters of the largest-invariant-factor probe: how many systems to
/// solve and how large the right-hand-side entry set is.
struct LifConfig {
    std::size_t solve_count = 2;  // r
    mpz_class rhs_range = 2;      // beta: b entries drawn from a set of this many integers

    LifConfig() = default;
    LifConfig(std::size_t r, mpz_class beta) : solve_count(r), rhs_range(std::move(beta)) {
        if (solve_count < 1 || rhs_range < 2) throw std::invalid_argument("LifConfig: r >= 1, beta >= 2 required");
    }
};

enum class LifRegime {
    expected_constant_gap,  // r=2, beta=ceil(log2 H): expected missed bits O(1)
    equality_one_third,     // r=2, beta=6+ceil(2 log2 H): exact with probability >= 1/3
    equality_epsilon,       // r=ceil(log2 log2 H + log2(1/eps)), beta=2: exact w.p. >= 1-eps
};

/// The (r, beta) pair of the requested probabilistic regime for a matrix with
/// determinant bound H.
inline LifConfig lif_config_for(const mpz_class& H, LifRegime regime, double epsilon = 0.5) {
    if (H < 2) throw std::invalid_argument("lif_config_for: H must be >= 2");
    const unsigned long lg = ceil_log2(H);
    switch (regime) {
        case LifRegime::expected_constant_gap:
            return LifConfig(2, mpz_class(std::max(2ul, lg)));
        case LifRegime::equality_one_third:
            return LifConfig(2, mpz_class(6 + 2 * lg));
        case LifRegime::equality_epsilon: {
            if (epsilon <= 0 || epsilon >= 1) throw std::invalid_argument("lif_config_for: bad epsilon");
            const double r = std::ceil(std::log2(std::max(1.0, double(lg))) + std::log2(1.0 / epsilon));
            return LifConfig(std::size_t(std::max(1.0, r)), 2);
        }
    }
    throw std::logic_error("lif_config_for: unreachable");
}

/// Largest-invariant-factor probe: lcm of the solution denominators of
/// `solve_count` random systems A x = b, with b entries uniform on the
/// size-beta contiguous set centered at zero. The result always divides
/// s_n(A); under the regimes above it is close to (or equal to) s_n with the
/// stated probability. Singularity of A surfaces from the solver.
inline mpz_class lif(const IntMatrix& a, const LifConfig& cfg, PrimeSampler& sampler, Rng& rng) {
    if (!a.square()) throw std::invalid_argument("lif: matrix not square");
    const std::size_t n = a.rows();
    mpz_class acc = 1;
    std::vector<mpz_class> b(n);
    for (std::size_t s = 0; s < cfg.solve_count; ++s) {
        for (auto& v : b) v = rng.contiguous_set(cfg.rhs_range);
        const RationalVector x = dixon_solve(a, b, sampler);
        acc = lcm(acc, x.denominator);
    }
    return acc;
}

}  // namespace zdet
