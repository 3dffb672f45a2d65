#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "zdet/bounds.hpp"
#include "zdet/int_matrix.hpp"
#include "zdet/modfield.hpp"

namespace zdet {

struct SingularMatrix : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Rational solution of A x = b: reduced numerators over one common positive
/// denominator, gcd(denominator, gcd of numerators) = 1.
struct RationalVector {
    std::vector<mpz_class> numerators;
    mpz_class denominator{1};

    bool operator==(const RationalVector& o) const = default;
};

/// Recover n/d from u = n * d^{-1} mod m, given |n| <= numerator_bound and
/// 0 < d <= denominator_bound with 2 * numerator_bound * denominator_bound <= m.
/// Returns nothing when no such fraction exists.
inline std::optional<std::pair<mpz_class, mpz_class>> rational_reconstruct(
    const mpz_class& u, const mpz_class& m, const mpz_class& numerator_bound,
    const mpz_class& denominator_bound) {
    if (u < 0 || u >= m) throw std::invalid_argument("rational_reconstruct: residue out of range");
    if (numerator_bound < 0 || denominator_bound < 1 ||
        2 * numerator_bound * denominator_bound > m)
        throw std::invalid_argument("rational_reconstruct: bounds too large for the modulus");
    // half-extended Euclid on (m, u): r_i = s_i*m + t_i*u, stop at r <= N
    mpz_class r0 = m, r1 = u, t0 = 0, t1 = 1, q, tmp;
    while (r1 > numerator_bound) {
        q = r0 / r1;
        tmp = r0 - q * r1;
        r0 = r1;
        r1 = tmp;
        tmp = t0 - q * t1;
        t0 = t1;
        t1 = tmp;
    }
    mpz_class num = r1, den = t1;
    if (den < 0) {
        den = -den;
        num = -num;
    }
    if (den == 0 || den > denominator_bound) return std::nullopt;
    if (gcd(num, den) != 1) return std::nullopt;
    return std::make_pair(num, den);
}

namespace detail {

// A^{-1} mod p by Gauss-Jordan; empty when A is singular mod p
inline std::vector<std::uint64_t> inverse_mod_p(const IntMatrix& a, std::uint64_t p) {
    if (p >= (std::uint64_t(1) << 31)) throw std::invalid_argument("inverse_mod_p: prime too large");
    const std::size_t n = a.rows();
    std::vector<std::uint64_t> w = reduce_mod(a, p);
    std::vector<std::uint64_t> inv(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = 1;
    auto wa = [&](std::size_t i, std::size_t j) -> std::uint64_t& { return w[i * n + j]; };
    auto ia = [&](std::size_t i, std::size_t j) -> std::uint64_t& { return inv[i * n + j]; };
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        while (piv < n && wa(piv, k) == 0) ++piv;
        if (piv == n) return {};
        if (piv != k)
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(wa(piv, j), wa(k, j));
                std::swap(ia(piv, j), ia(k, j));
            }
        const std::uint64_t s = invmod(wa(k, k), p);
        for (std::size_t j = 0; j < n; ++j) {
            wa(k, j) = mulmod(wa(k, j), s, p);
            ia(k, j) = mulmod(ia(k, j), s, p);
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k || wa(i, k) == 0) continue;
            const std::uint64_t f = p - wa(i, k);
            for (std::size_t j = 0; j < n; ++j) {
                wa(i, j) = (wa(i, j) + f * wa(k, j)) % p;
                ia(i, j) = (ia(i, j) + f * ia(k, j)) % p;
            }
        }
    }
    return inv;
}

}  // namespace detail

/// Exact rational solution of A x = b by Dixon p-adic lifting: one random
/// word prime, one inverse mod p, then enough lifting steps that rational
/// reconstruction against the Cramer bounds is unique. The result is verified
/// by exact multiplication before returning.
///
/// A matrix singular mod the chosen prime is retried with a fresh prime; when
/// several primes in a row see rank < n the matrix is reported singular.
inline RationalVector dixon_solve(const IntMatrix& a, const std::vector<mpz_class>& b,
                                  PrimeSampler& sampler) {
    if (!a.square() || a.rows() != b.size())
        throw std::invalid_argument("dixon_solve: shape mismatch");
    const std::size_t n = a.rows();
    RationalVector x;
    x.numerators.assign(n, 0);
    if (n == 0) return x;

    bool zero_rhs = true;
    for (const auto& v : b)
        if (v != 0) {
            zero_rhs = false;
            break;
        }

    // pick a prime where A is invertible
    std::uint64_t p = 0;
    std::vector<std::uint64_t> ainv;
    for (int attempt = 0; attempt < 3; ++attempt) {
        p = sampler.next();
        ainv = detail::inverse_mod_p(a, p);
        if (!ainv.empty()) break;
    }
    if (ainv.empty()) throw SingularMatrix("dixon_solve: matrix singular over Q (rank < n mod 3 primes)");
    if (zero_rhs) return x;

    const mpz_class den_bound = hadamard_bound(a);
    const mpz_class num_bound = solution_numerator_bound(a, b);

    // lifting length: p^m >= 2 * num_bound * den_bound
    const mpz_class target = 2 * num_bound * den_bound;
    unsigned long m = 1;
    mpz_class pm = p;
    while (pm < target) {
        pm *= p;
        ++m;
    }

    // residual r starts at b; every step peels one p-adic digit vector
    std::vector<mpz_class> resid(b);
    std::vector<mpz_class> y(n, 0);
    std::vector<std::uint64_t> rbar(n), digit(n);
    mpz_class ppow = 1;
    for (unsigned long step = 0; step < m; ++step) {
        for (std::size_t i = 0; i < n; ++i) rbar[i] = mpz_fdiv_ui(resid[i].get_mpz_t(), p);
        for (std::size_t i = 0; i < n; ++i) {
            unsigned __int128 acc = 0;
            const std::uint64_t* row = &ainv[i * n];
            for (std::size_t j = 0; j < n; ++j) acc += (unsigned __int128)row[j] * rbar[j];
            digit[i] = std::uint64_t(acc % p);
        }
        for (std::size_t i = 0; i < n; ++i)
            mpz_addmul_ui(y[i].get_mpz_t(), ppow.get_mpz_t(), digit[i]);
        // resid = (resid - A * digit) / p, exactly
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j)
                if (digit[j]) mpz_submul_ui(resid[i].get_mpz_t(), a(i, j).get_mpz_t(), digit[j]);
            mpz_divexact_ui(resid[i].get_mpz_t(), resid[i].get_mpz_t(), p);
        }
        ppow *= p;
    }

    // Per-entry reconstruction with a shared running denominator: each entry
    // is first tried against the current denominator (cheap), full
    // reconstruction only on mismatch. The shortcut is validated by exact
    // multiplication below; one retry does every entry the slow way.
    auto reconstruct = [&](bool shared) {
        mpz_class den = 1, u, v;
        std::vector<mpz_class> nums(n);
        for (std::size_t i = 0; i < n; ++i) {
            u = y[i];
            if (shared) {
                v = u * den % pm;
                to_symmetric(v, pm);
                if (abs(v) <= num_bound) {
                    nums[i] = v;
                    continue;
                }
            }
            auto rec = rational_reconstruct(u, pm, num_bound, den_bound);
            if (!rec) throw std::runtime_error("dixon_solve: rational reconstruction failed");
            const mpz_class& d_new = rec->second;
            mpz_class l = lcm(den, d_new);
            mpz_class scale = l / den;
            if (scale != 1)
                for (std::size_t j = 0; j < i; ++j) nums[j] *= scale;
            nums[i] = rec->first * (l / d_new);
            den = l;
        }
        // strip the common content
        mpz_class g = den;
        for (const auto& nu : nums) {
            g = gcd(g, nu);
            if (g == 1) break;
        }
        if (g > 1) {
            for (auto& nu : nums) mpz_divexact(nu.get_mpz_t(), nu.get_mpz_t(), g.get_mpz_t());
            mpz_divexact(den.get_mpz_t(), den.get_mpz_t(), g.get_mpz_t());
        }
        return std::make_pair(std::move(nums), std::move(den));
    };

    // exact verification: A * nums == den * b
    auto verifies = [&](const std::vector<mpz_class>& nums, const mpz_class& den) {
        mpz_class acc;
        for (std::size_t i = 0; i < n; ++i) {
            acc = 0;
            for (std::size_t j = 0; j < n; ++j)
                mpz_addmul(acc.get_mpz_t(), a(i, j).get_mpz_t(), nums[j].get_mpz_t());
            if (acc != den * b[i]) return false;
        }
        return true;
    };

    auto [nums, den] = reconstruct(true);
    if (!verifies(nums, den)) {
        std::tie(nums, den) = reconstruct(false);
        if (!verifies(nums, den)) throw std::runtime_error("dixon_solve: verification failed");
    }

    x.numerators = std::move(nums);
    x.denominator = std::move(den);
    return x;
}

}  // namespace zdet
