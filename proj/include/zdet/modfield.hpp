#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <stdexcept>
#include <vector>

#include <gmpxx.h>

#include "zdet/int_matrix.hpp"
#include "zdet/rng.hpp"

namespace zdet {

// ---- word-sized arithmetic mod p -------------------------------------------

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    return std::uint64_t((unsigned __int128)a * b % p);
}

inline std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t p) {
    std::uint64_t r = 1 % p;
    a %= p;
    while (e) {
        if (e & 1) r = mulmod(r, a, p);
        a = mulmod(a, a, p);
        e >>= 1;
    }
    return r;
}

inline std::uint64_t invmod(std::uint64_t a, std::uint64_t p) {
    // extended Euclid; p prime, a != 0 mod p
    std::int64_t t = 0, newt = 1;
    std::int64_t r = std::int64_t(p), newr = std::int64_t(a % p);
    while (newr != 0) {
        const std::int64_t q = r / newr;
        t -= q * newt;
        std::swap(t, newt);
        r -= q * newr;
        std::swap(r, newr);
    }
    if (r != 1) throw std::domain_error("invmod: argument not invertible");
    return std::uint64_t(t < 0 ? t + std::int64_t(p) : t);
}

/// Deterministic Miller-Rabin, valid for every n < 2^64 with this witness set.
inline bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % p == 0) return n == p;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        std::uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

// ---- prime sampling ---------------------------------------------------------

struct PrimeExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// all primes in the open interval (lo, hi); simple sieve, window <= 2^22 wide
inline std::shared_ptr<const std::vector<std::uint64_t>> sieve_window(std::uint64_t lo, std::uint64_t hi) {
    static std::mutex mu;
    static std::map<std::pair<std::uint64_t, std::uint64_t>, std::shared_ptr<const std::vector<std::uint64_t>>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({lo, hi});
    if (it != cache.end()) return it->second;

    const std::uint64_t first = lo + 1, last = hi - 1;
    std::vector<bool> composite(last - first + 1, false);
    for (std::uint64_t q = 2; q * q <= last; ++q) {
        if (q > 2 && q % 2 == 0) continue;
        std::uint64_t start = ((first + q - 1) / q) * q;
        if (start == q) start = 2 * q;
        for (std::uint64_t v = start; v <= last; v += q) composite[v - first] = true;
    }
    auto primes = std::make_shared<std::vector<std::uint64_t>>();
    for (std::uint64_t v = first; v <= last; ++v)
        if (!composite[v - first] && v >= 2) primes->push_back(v);
    cache[{lo, hi}] = primes;
    return primes;
}

}  // namespace detail

/// Uniform sampling of distinct verified primes from the open window
/// (lower, upper). Windows up to 2^22 wide are sieved once and sampled
/// without replacement exactly; wider windows use rejection sampling with a
/// Miller-Rabin test and an attempt cap.
class PrimeSampler {
public:
    PrimeSampler(std::uint64_t lower, std::uint64_t upper, std::uint64_t seed)
        : lower_(lower), upper_(upper), rng_(seed) {
        if (upper < lower + 3) throw std::invalid_argument("PrimeSampler: empty window");
        if (upper - lower <= (std::uint64_t(1) << 22)) {
            sieved_ = detail::sieve_window(lower, upper);
            taken_.assign(sieved_->size(), false);
            population_ = sieved_->size();
        } else {
            // proven bounds: pi(x) > x/ln x (x >= 17), pi(x) < 1.26 x/ln x
            const double hi = double(upper) / std::log(double(upper));
            const double lo = 1.26 * double(lower) / std::log(double(lower));
            population_ = hi > lo ? std::uint64_t(hi - lo) : 0;
        }
    }

    std::uint64_t lower() const { return lower_; }
    std::uint64_t upper() const { return upper_; }

    /// |P|: the number of primes in the window (exact when sieved, otherwise
    /// a proven lower bound so probability estimates stay conservative).
    std::uint64_t population() const { return population_; }

    std::uint64_t issued() const { return issued_; }

    std::uint64_t remaining() const { return population_ > issued_ ? population_ - issued_ : 0; }

    /// A fresh prime, uniform over the unused ones.
    std::uint64_t next() {
        if (sieved_) {
            if (issued_ >= sieved_->size())
                throw PrimeExhausted("prime window (" + std::to_string(lower_) + ", " +
                                     std::to_string(upper_) + ") exhausted");
            for (;;) {
                const std::size_t idx = std::size_t(rng_.below(std::uint64_t(sieved_->size())));
                if (taken_[idx]) continue;
                taken_[idx] = true;
                ++issued_;
                return (*sieved_)[idx];
            }
        }
        for (std::uint64_t attempt = 0; attempt < 200000; ++attempt) {
            const std::uint64_t v = lower_ + 1 + rng_.below(upper_ - lower_ - 1);
            if (!is_prime_u64(v)) continue;
            if (used_.count(v)) continue;
            used_.insert(v);
            ++issued_;
            return v;
        }
        throw PrimeExhausted("prime window too small for requested work");
    }

    /// A fresh prime that does not divide k. Primes that do divide k are
    /// consumed (they are useless for any residue work against k).
    std::uint64_t next_coprime(const mpz_class& k) {
        for (;;) {
            const std::uint64_t p = next();
            if (k == 1 || !mpz_divisible_ui_p(k.get_mpz_t(), p)) return p;
        }
    }

private:
    std::uint64_t lower_, upper_;
    Rng rng_;
    std::shared_ptr<const std::vector<std::uint64_t>> sieved_;
    std::vector<bool> taken_;
    std::set<std::uint64_t> used_;
    std::uint64_t population_ = 0;
    std::uint64_t issued_ = 0;
};

inline PrimeSampler default_prime_sampler(std::uint64_t seed, unsigned prime_bits = 19) {
    return PrimeSampler(std::uint64_t(1) << prime_bits, std::uint64_t(1) << (prime_bits + 1), seed);
}

// ---- modular elimination ----------------------------------------------------

namespace detail {

// entries reduced once into [0, p); cost n^2 * size(norm) word operations
inline std::vector<std::uint64_t> reduce_mod(const IntMatrix& a, std::uint64_t p) {
    std::vector<std::uint64_t> w(a.rows() * a.cols());
    std::size_t idx = 0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            w[idx++] = mpz_fdiv_ui(a(i, j).get_mpz_t(), p);
    return w;
}

}  // namespace detail

/// det(A) mod p by LU elimination over Z_p; 0 when A is singular mod p.
/// p must be below 2^31 so the fused update products fit one word.
inline std::uint64_t lu_det_mod_p(const IntMatrix& a, std::uint64_t p) {
    if (!a.square()) throw std::invalid_argument("lu_det_mod_p: matrix not square");
    if (p >= (std::uint64_t(1) << 31)) throw std::invalid_argument("lu_det_mod_p: prime too large");
    const std::size_t n = a.rows();
    if (n == 0) return 1 % p;
    std::vector<std::uint64_t> w = detail::reduce_mod(a, p);
    auto at = [&w, n](std::size_t i, std::size_t j) -> std::uint64_t& { return w[i * n + j]; };

    std::uint64_t det = 1;
    bool negate = false;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        while (piv < n && at(piv, k) == 0) ++piv;
        if (piv == n) return 0;
        if (piv != k) {
            for (std::size_t j = k; j < n; ++j) std::swap(at(piv, j), at(k, j));
            negate = !negate;
        }
        const std::uint64_t pivot = at(k, k);
        det = mulmod(det, pivot, p);
        const std::uint64_t inv = invmod(pivot, p);
        for (std::size_t i = k + 1; i < n; ++i) {
            if (at(i, k) == 0) continue;
            const std::uint64_t f = p - mulmod(at(i, k), inv, p);
            if (f == p) continue;
            for (std::size_t j = k; j < n; ++j) at(i, j) = (at(i, j) + f * at(k, j)) % p;
        }
    }
    return negate ? (p - det) % p : det;
}

/// Rank of A over Z_p (rectangular allowed); same elimination as the
/// determinant, counting pivots.
inline std::size_t rank_mod_p(const IntMatrix& a, std::uint64_t p) {
    if (p >= (std::uint64_t(1) << 31)) throw std::invalid_argument("rank_mod_p: prime too large");
    const std::size_t m = a.rows(), n = a.cols();
    std::vector<std::uint64_t> w = detail::reduce_mod(a, p);
    auto at = [&w, n](std::size_t i, std::size_t j) -> std::uint64_t& { return w[i * n + j]; };

    std::size_t rank = 0;
    for (std::size_t col = 0; col < n && rank < m; ++col) {
        std::size_t piv = rank;
        while (piv < m && at(piv, col) == 0) ++piv;
        if (piv == m) continue;
        if (piv != rank)
            for (std::size_t j = col; j < n; ++j) std::swap(at(piv, j), at(rank, j));
        const std::uint64_t inv = invmod(at(rank, col), p);
        for (std::size_t i = rank + 1; i < m; ++i) {
            if (at(i, col) == 0) continue;
            const std::uint64_t f = p - mulmod(at(i, col), inv, p);
            if (f == p) continue;
            for (std::size_t j = col; j < n; ++j) at(i, j) = (at(i, j) + f * at(rank, j)) % p;
        }
        ++rank;
    }
    return rank;
}

}  // namespace zdet
