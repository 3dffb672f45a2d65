#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <gmpxx.h>

#include "zdet/int_matrix.hpp"

namespace zdet {

/// Reduce r (already in [-floor(m/2), m)) to the symmetric range
/// [-floor(m/2), ceil(m/2)) of residues mod m.
inline void to_symmetric(mpz_class& r, const mpz_class& m) {
    if (2 * r >= m) r -= m;
}

/// Smallest k >= 0 with 2^k >= x; requires x >= 1.
inline unsigned long ceil_log2(const mpz_class& x) {
    if (x <= 0) throw std::invalid_argument("ceil_log2: x must be >= 1");
    if (x == 1) return 0;
    mpz_class y = x - 1;
    return mpz_sizeinbase(y.get_mpz_t(), 2);
}

/// log2(x) as a double, accurate to ~1 ulp for any magnitude; x >= 1.
inline double log2_approx(const mpz_class& x) {
    signed long exp = 0;
    const double d = mpz_get_d_2exp(&exp, x.get_mpz_t());
    return double(exp) + std::log2(d);
}

/// Ceiling of the square root of a nonnegative integer.
inline mpz_class isqrt_ceil(const mpz_class& x) {
    mpz_class s, r;
    mpz_sqrtrem(s.get_mpz_t(), r.get_mpz_t(), x.get_mpz_t());
    if (r != 0) s += 1;
    return s;
}

/// Hadamard's bound: smallest integer >= (sqrt(n)*norm(A))^n, computed
/// root-free by taking the ceiling square root of n^n * norm^(2n) so the
/// result is a safe over-estimate of |det(A)|. Returns 1 for a zero matrix.
inline mpz_class hadamard_bound(const IntMatrix& a) {
    if (!a.square()) throw std::invalid_argument("hadamard_bound: matrix not square");
    if (a.rows() == 0) throw std::invalid_argument("hadamard_bound: empty matrix");
    const unsigned long n = a.rows();
    const mpz_class nn = a.norm();
    if (nn == 0) return 1;
    mpz_class sq;
    mpz_ui_pow_ui(sq.get_mpz_t(), n, n);        // n^n
    mpz_class np;
    mpz_pow_ui(np.get_mpz_t(), nn.get_mpz_t(), 2 * n);
    sq *= np;                                   // n^n * norm^(2n) = bound^2
    return isqrt_ceil(sq);
}

/// Cramer-style bound on the numerators of the solution of A x = b over Q:
/// smallest integer >= (sqrt(n)*norm(A))^(n-1) * sqrt(n) * norm(b).
inline mpz_class solution_numerator_bound(const IntMatrix& a, const std::vector<mpz_class>& b) {
    if (!a.square() || a.rows() != b.size())
        throw std::invalid_argument("solution_numerator_bound: shape mismatch");
    const unsigned long n = a.rows();
    mpz_class bn = 0;
    for (const auto& v : b)
        if (mpz_cmpabs(v.get_mpz_t(), bn.get_mpz_t()) > 0) bn = abs(v);
    if (bn == 0) return 0;
    const mpz_class an = a.norm();
    mpz_class sq;
    mpz_ui_pow_ui(sq.get_mpz_t(), n, n);        // n^n = (sqrt(n)^(n-1) * sqrt(n))^2
    if (an != 0) {
        mpz_class ap;
        mpz_pow_ui(ap.get_mpz_t(), an.get_mpz_t(), 2 * (n - 1));
        sq *= ap;
    }
    sq *= bn * bn;
    return isqrt_ceil(sq);
}

}  // namespace zdet
