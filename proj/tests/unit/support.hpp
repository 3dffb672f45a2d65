// Independent oracles for the test suite. These deliberately use the dumbest
// possible method (enumeration, cofactor expansion) so they share no code
// path with the implementations they check.
#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "zdet/int_matrix.hpp"

namespace testsupport {

// cofactor expansion along the first row; fine up to n ~ 8
inline mpz_class cofactor_det(const zdet::IntMatrix& a) {
    const std::size_t n = a.rows();
    if (n == 0) return 1;
    if (n == 1) return a(0, 0);
    mpz_class acc = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (a(0, j) == 0) continue;
        zdet::IntMatrix minor(n - 1, n - 1);
        for (std::size_t r = 1; r < n; ++r) {
            std::size_t cc = 0;
            for (std::size_t c = 0; c < n; ++c) {
                if (c == j) continue;
                minor(r - 1, cc++) = a(r, c);
            }
        }
        const mpz_class term = a(0, j) * cofactor_det(minor);
        if (j % 2 == 0)
            acc += term;
        else
            acc -= term;
    }
    return acc;
}

// scan the symmetric range of the product modulus for the unique value
// matching every residue
inline mpz_class brute_crt_symmetric(const std::vector<std::pair<std::uint64_t, std::uint64_t>>& pairs) {
    mpz_class m = 1;
    for (const auto& [p, _] : pairs) m *= p;
    for (mpz_class v = -(m / 2); 2 * v < m; ++v) {
        bool ok = true;
        for (const auto& [p, r] : pairs) {
            mpz_class rem = v % mpz_class(p);
            if (rem < 0) rem += p;
            if (rem != r) {
                ok = false;
                break;
            }
        }
        if (ok) return v;
    }
    throw std::logic_error("brute_crt_symmetric: no value found");
}

// exhaustive search over |num| <= nb, 1 <= den <= db with gcd 1 and
// num = u*den mod m
inline std::optional<std::pair<mpz_class, mpz_class>> brute_rational_reconstruct(
    const mpz_class& u, const mpz_class& m, long nb, long db) {
    for (long den = 1; den <= db; ++den) {
        for (long num = -nb; num <= nb; ++num) {
            if (gcd(mpz_class(num), mpz_class(den)) != 1) continue;
            mpz_class lhs = (u * den - num) % m;
            if (lhs % m == 0) return std::make_pair(mpz_class(num), mpz_class(den));
        }
    }
    return std::nullopt;
}

}  // namespace testsupport
