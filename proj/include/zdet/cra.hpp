#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

#include <gmpxx.h>

#include "zdet/bounds.hpp"
#include "zdet/int_matrix.hpp"
#include "zdet/modfield.hpp"

namespace zdet {

/// Exact bound on the probability that a reconstruction which stayed stable
/// for `stability` consecutive fresh primes is still wrong:
///
///     R' (R'-1) ... (R'-k+1) / ((U+k)(U+k-1) ... (U+1)) < epsilon
///
/// with R' the number of primes above `prime_lower` that could divide the
/// undiscovered cofactor, U the unused primes left in the pool. Evaluated in
/// exact rational arithmetic; epsilon enters as its exact binary expansion.
inline bool et_ratio_below(const mpz_class& bound_plus_r, const mpz_class& base_modulus,
                           std::uint64_t prime_lower, std::size_t stability,
                           std::uint64_t population_remaining, double epsilon) {
    if (stability == 0) return false;  // empty product == 1, never < epsilon
    // R' = smallest j >= 0 with base * l^j >= bound_plus_r
    unsigned long rprime = 0;
    mpz_class t = base_modulus;
    while (t < bound_plus_r) {
        t *= prime_lower;
        ++rprime;
    }
    if (rprime < stability) return true;  // fewer candidate primes than stable steps: certain
    mpz_class num = 1, den = 1;
    for (std::size_t i = 0; i < stability; ++i) {
        num *= mpz_class(rprime - i);
        den *= mpz_class(population_remaining + stability - i);
    }
    mpq_class eps(epsilon);  // exact: doubles are dyadic rationals
    eps.canonicalize();
    return num * eps.get_den() < eps.get_num() * den;
}

/// Static stability count: the smallest k with
/// k >= ceil( log(1/eps) / (log(P') - log(log_l(H))) ), P' = |P| - ceil(log_l H).
/// Requires P' > log_l(H).
inline std::size_t et_static_count(const mpz_class& H, std::uint64_t prime_lower,
                                   std::uint64_t population, double epsilon) {
    if (H < 1 || epsilon <= 0 || epsilon >= 1)
        throw std::invalid_argument("et_static_count: bad arguments");
    const double log_l_H = std::max(log2_approx(H), 1e-9) / std::log2(double(prime_lower));
    const double pprime = double(population) - std::ceil(log_l_H);
    if (!(pprime > log_l_H))
        throw std::invalid_argument("et_static_count: prime pool too small for this bound");
    const double k = std::log2(1.0 / epsilon) / (std::log2(pprime) - std::log2(log_l_H));
    return std::size_t(std::max(1.0, std::ceil(k)));
}

/// Residue accumulator for Chinese remaindering in the symmetric range,
/// reconstructing det(A)/K for a known divisor K. Keeps the raw residues of
/// det(A) so the divisor can change without recomputing any modular
/// determinant.
class CraState {
public:
    explicit CraState(mpz_class det_bound, std::uint64_t prime_lower)
        : H_(std::move(det_bound)), Heff_(H_), prime_lower_(prime_lower) {
        if (H_ < 1) throw std::invalid_argument("CraState: bound must be >= 1");
    }

    /// Fold in det(A) mod p. Rejects repeated primes and primes dividing K.
    void update(std::uint64_t p, std::uint64_t det_residue) {
        if (mpz_divisible_ui_p(K_.get_mpz_t(), p))
            throw std::invalid_argument("CraState::update: prime divides the divisor");
        for (const auto& pr : pairs_)
            if (pr.p == p) throw std::invalid_argument("CraState::update: repeated prime");
        pairs_.push_back({p, det_residue % p});
        const mpz_class before = r_;
        const bool had = pairs_.size() > 1;
        fold(p, det_residue % p);
        if (had && r_ == before)
            ++stability_;
        else
            stability_ = 0;
    }

    /// Change the known divisor: raw residues are kept, the reconstruction is
    /// rescaled from them, stability restarts. Pairs whose prime divides the
    /// new K are evicted and returned so the caller can recompute them later.
    std::vector<std::uint64_t> set_divisor(const mpz_class& k) {
        if (k < 1) throw std::invalid_argument("CraState::set_divisor: divisor must be >= 1");
        std::vector<std::uint64_t> evicted;
        std::vector<Pair> kept;
        kept.reserve(pairs_.size());
        for (const auto& pr : pairs_) {
            if (mpz_divisible_ui_p(k.get_mpz_t(), pr.p))
                evicted.push_back(pr.p);
            else
                kept.push_back(pr);
        }
        pairs_ = std::move(kept);
        K_ = k;
        mpz_cdiv_q(Heff_.get_mpz_t(), H_.get_mpz_t(), K_.get_mpz_t());
        if (Heff_ < 1) Heff_ = 1;
        rebuild();
        return evicted;
    }

    /// Certified: the modulus covers the whole symmetric range of det/K.
    bool certified() const { return modulus_ >= 2 * Heff_; }

    /// Early-termination decision: certified, or the stability run bounds the
    /// failure probability below epsilon.
    bool et_holds(double epsilon, std::uint64_t population_remaining) const {
        if (certified()) return true;
        if (stability_ == 0) return false;
        // base modulus excludes the primes added during the stable run
        mpz_class base = modulus_;
        const std::size_t k = stability_;
        for (std::size_t i = 0; i < k; ++i)
            mpz_divexact_ui(base.get_mpz_t(), base.get_mpz_t(), pairs_[pairs_.size() - 1 - i].p);
        return et_ratio_below(Heff_ + abs(r_), base, prime_lower_, k, population_remaining, epsilon);
    }

    const mpz_class& value() const { return r_; }                // det/K, symmetric range
    mpz_class determinant() const { return r_ * K_; }
    const mpz_class& modulus() const { return modulus_; }
    const mpz_class& divisor() const { return K_; }
    const mpz_class& bound() const { return H_; }
    const mpz_class& effective_bound() const { return Heff_; }
    std::size_t stability() const { return stability_; }
    std::size_t pair_count() const { return pairs_.size(); }
    std::uint64_t prime_lower() const { return prime_lower_; }

    struct Pair {
        std::uint64_t p;
        std::uint64_t residue;  // det(A) mod p, unscaled
    };
    const std::vector<Pair>& pairs() const { return pairs_; }

private:
    // incremental CRT: one modular inverse and one scaled add per step
    void fold(std::uint64_t p, std::uint64_t raw) {
        const std::uint64_t kinv = invmod(mpz_fdiv_ui(K_.get_mpz_t(), p), p);
        const std::uint64_t scaled = mulmod(raw, kinv, p);
        if (modulus_ == 1) {
            r_ = scaled;
            modulus_ = p;
            to_symmetric(r_, modulus_);
            return;
        }
        const std::uint64_t r_mod_p = mpz_fdiv_ui(r_.get_mpz_t(), p);
        const std::uint64_t minv = invmod(mpz_fdiv_ui(modulus_.get_mpz_t(), p), p);
        const std::uint64_t t = mulmod((scaled + p - r_mod_p) % p, minv, p);
        r_ += modulus_ * t;
        modulus_ *= p;
        to_symmetric(r_, modulus_);
    }

    void rebuild() {
        modulus_ = 1;
        r_ = 0;
        stability_ = 0;
        std::vector<Pair> pairs;
        pairs.swap(pairs_);
        for (const auto& pr : pairs) {
            pairs_.push_back(pr);
            fold(pr.p, pr.residue);
        }
        stability_ = 0;
    }

    std::vector<Pair> pairs_;
    mpz_class H_, Heff_;
    mpz_class K_{1};
    mpz_class modulus_{1};
    mpz_class r_{0};
    std::uint64_t prime_lower_;
    std::size_t stability_ = 0;
};

/// Early-terminated CRA on det(A)/K: fresh primes until the stability rule
/// fires at the given epsilon or the bound certifies. Monte Carlo: the result
/// is wrong with probability below epsilon.
inline mpz_class cra_det_early(const IntMatrix& a, const mpz_class& k, double epsilon,
                               PrimeSampler& sampler) {
    if (!a.square()) throw std::invalid_argument("cra_det_early: matrix not square");
    CraState st(hadamard_bound(a), sampler.lower());
    st.set_divisor(k);
    while (!st.et_holds(epsilon, sampler.remaining())) {
        const std::uint64_t p = sampler.next_coprime(k);
        st.update(p, lu_det_mod_p(a, p));
    }
    return st.value();
}

/// Deterministic CRA: accumulate fresh primes until the modulus certifies,
/// returning det(A)/K exactly (det(A) itself for K=1). `threads` > 1 batches
/// the modular determinants across workers; the fold order stays the draw
/// order, so the result does not depend on the thread count.
inline mpz_class cra_det_certified(const IntMatrix& a, const mpz_class& k, PrimeSampler& sampler,
                                   unsigned threads = 1) {
    if (!a.square()) throw std::invalid_argument("cra_det_certified: matrix not square");
    CraState st(hadamard_bound(a), sampler.lower());
    st.set_divisor(k);
    while (!st.certified()) {
        if (threads <= 1) {
            const std::uint64_t p = sampler.next_coprime(k);
            st.update(p, lu_det_mod_p(a, p));
            continue;
        }
        std::vector<std::uint64_t> batch;
        for (unsigned i = 0; i < 2 * threads && !st.certified(); ++i) batch.push_back(sampler.next_coprime(k));
        std::vector<std::uint64_t> dets(batch.size());
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back([&, w]() {
                for (std::size_t idx = w; idx < batch.size(); idx += threads)
                    dets[idx] = lu_det_mod_p(a, batch[idx]);
            });
        }
        for (auto& th : pool) th.join();
        for (std::size_t idx = 0; idx < batch.size() && !st.certified(); ++idx)
            st.update(batch[idx], dets[idx]);
    }
    return st.value();
}

}  // namespace zdet
