#pragma once

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "zdet/bounds.hpp"
#include "zdet/cra.hpp"
#include "zdet/dixon.hpp"
#include "zdet/int_matrix.hpp"
#include "zdet/rng.hpp"
#include "zdet/stopwatch.hpp"

namespace zdet {

/// Bound on the expected number of nontrivial invariant factors of an n x n
/// matrix with entries uniform on a (lambda+1)-point set:
/// ceil(sqrt(2 log_lambda(n))) + 3. lambda below 2 is clamped (the bound
/// needs a base > 1), with a one-time warning.
inline std::size_t expected_factor_count(std::size_t n, std::size_t lambda) {
    if (n < 2) return 4;
    if (lambda < 2) {
        static bool warned = false;
        if (!warned) {
            warned = true;
            std::cerr << "zdet: entry-set parameter below 2 clamped to 2 for the factor-count bound\n";
        }
        lambda = 2;
    }
    const double lg = std::log(double(n)) / std::log(double(lambda));
    return std::size_t(std::ceil(std::sqrt(2.0 * lg))) + 3;
}

/// Tuning knobs of the trailing-factor search.
struct TrailingParams {
    mpz_class entry_range = 2;   // S: size of the set the b and R entries come from
    std::size_t min_level = 2;   // levels below this are never treated as stable
    std::size_t max_level = 2;   // solving budget: highest level attempted
};

/// Dense-case parameter choice: min_level = 2, max_level = max(2, E) with
/// E the expected-factor-count bound, and S = 13 E^3 ceil(log2 H)^4.
inline TrailingParams trailing_params(const IntMatrix& a, std::size_t lambda) {
    if (!a.square()) throw std::invalid_argument("trailing_params: matrix not square");
    TrailingParams p;
    const std::size_t e = expected_factor_count(a.rows(), lambda);
    p.min_level = 2;
    p.max_level = std::max<std::size_t>(p.min_level, e);
    const mpz_class lg(std::max(1ul, ceil_log2(hadamard_bound(a))));
    p.entry_range = 13 * mpz_class(e) * e * e * lg * lg * lg * lg;
    if (p.entry_range < 2) p.entry_range = 2;
    return p;
}

/// Search state for the products of the largest invariant factors.
///
/// Level i estimates pi_i = s_n * ... * s_{n-i+1} from the numerator matrix N
/// of an n x i multi-right-hand-side solve: a random i x n perturbation R is
/// applied and pi~_i = s~^i / gcd(det(RN), s~^i), which always divides pi_i.
/// Columns are kept in two pools, one per phase bit; a level only counts as
/// done after estimates built from both pools' independent (B, R) randomness
/// agree, which realizes the two-trial gcd scheme.
class TrailingState {
public:
    enum class Step {
        advanced,               // estimate grew the known divisor (or was unconfirmed)
        stabilized_new,         // first stabilization at this level; phase flipped
        stabilized_confirmed,   // independent randomness agreed: level is done
    };

    TrailingState(TrailingParams params, std::uint64_t lambda_hint, Stopwatch* watch = nullptr)
        : params_(std::move(params)), lambda_hint_(lambda_hint), watch_(watch) {
        pi_[0] = 1;
    }

    /// One fresh right-hand side for the active pool: solve, fold the
    /// denominator into s~, record the column.
    void extend(const IntMatrix& a, PrimeSampler& sampler, Rng& rng) {
        const std::size_t n = a.rows();
        std::vector<mpz_class> b(n);
        for (auto& v : b) v = rng.contiguous_set(params_.entry_range);
        const double t0 = monotonic_seconds();
        RationalVector x = dixon_solve(a, b, sampler);
        if (watch_) watch_->record(Stopwatch::Kind::solving, monotonic_seconds() - t0);
        den_lcm_ = lcm(den_lcm_, x.denominator);
        pools_[phase_].push_back(std::move(x));
        ++solvings_;
    }

    /// pi~_i from the active pool's first i columns and a fresh random
    /// perturbation. det(RN) is computed by deterministic (certified) CRA.
    /// Returns the estimate and whether it is confirmed; a vanishing det(RN)
    /// after retries degrades to the previous level's value, unconfirmed.
    std::pair<mpz_class, bool> pi_estimate(std::size_t i, PrimeSampler& sampler, Rng& rng) {
        const auto& pool = pools_[phase_];
        if (i < 1 || i > pool.size()) throw std::invalid_argument("pi_estimate: level out of range");
        const std::size_t n = pool[0].numerators.size();

        IntMatrix nmat(n, i);  // N = s~ X, integral because s~ is the lcm of the denominators
        for (std::size_t c = 0; c < i; ++c) {
            mpz_class scale;
            mpz_divexact(scale.get_mpz_t(), den_lcm_.get_mpz_t(), pool[c].denominator.get_mpz_t());
            for (std::size_t r = 0; r < n; ++r) nmat(r, c) = pool[c].numerators[r] * scale;
        }
        mpz_class spow;
        mpz_pow_ui(spow.get_mpz_t(), den_lcm_.get_mpz_t(), i);

        for (int attempt = 0; attempt < 3; ++attempt) {
            IntMatrix r(i, n);
            for (std::size_t ri = 0; ri < i; ++ri)
                for (std::size_t c = 0; c < n; ++c) r(ri, c) = rng.contiguous_set(params_.entry_range);
            const IntMatrix rn = r * nmat;
            // det(RN) concerns a different matrix, so a derived sampler over
            // the same window keeps the caller's pool for det(A) work
            PrimeSampler local(sampler.lower(), sampler.upper(), rng.next());
            const mpz_class d = cra_det_certified(rn, 1, local);
            if (d == 0) continue;
            mpz_class g = gcd(d, spow);
            mpz_class pi;
            mpz_divexact(pi.get_mpz_t(), spow.get_mpz_t(), g.get_mpz_t());  // exact by construction
            return {pi, true};
        }
        return {pi_.count(i - 1) ? pi_.at(i - 1) : known_divisor_, false};
    }

    /// One pass of the inner search loop at the current level: make sure the
    /// active pool has `level` columns, estimate, fold into the known divisor
    /// K, and apply the stabilization bookkeeping. `gain_threshold_bits`
    /// widens the stabilization test from exact equality (0 bits) to "the
    /// level gained at most this many bits", the timing-based variant.
    Step round(const IntMatrix& a, PrimeSampler& sampler, Rng& rng,
               double gain_threshold_bits = 0.0) {
        const std::size_t i = level_;
        while (pools_[phase_].size() < i) extend(a, sampler, rng);

        const mpz_class before = known_divisor_;
        mpz_class pi;
        bool confirmed = true;
        if (i == 1)
            pi = den_lcm_;
        else
            std::tie(pi, confirmed) = pi_estimate(i, sampler, rng);
        known_divisor_ = lcm(known_divisor_, pi);
        known_divisor_ = lcm(known_divisor_, den_lcm_);  // denominators divide det too
        pi_[i] = known_divisor_;

        bool stable = false;
        if (i > params_.min_level && confirmed) {
            if (known_divisor_ == before)
                stable = true;
            else if (gain_threshold_bits > 0.0)
                stable = log2_approx(known_divisor_) - log2_approx(before) <= gain_threshold_bits;
        }
        if (!stable) {
            ++level_;
            return Step::advanced;
        }
        if (i > k_app_) {
            k_done_ = k_app_;
            k_app_ = i;
            phase_ ^= 1;
            level_ = k_done_ + 1;
            return Step::stabilized_new;
        }
        if (i > k_done_) k_done_ = i;
        return Step::stabilized_confirmed;
    }

    /// After a confirmed level fails to finish the job: skip straight to the
    /// top level and keep extending there.
    void jump_to_max() { level_ = params_.max_level; }

    const mpz_class& known_divisor() const { return known_divisor_; }
    const mpz_class& den_lcm() const { return den_lcm_; }
    std::size_t level() const { return level_; }
    std::size_t k_done() const { return k_done_; }
    std::size_t k_app() const { return k_app_; }
    int phase() const { return phase_; }
    std::size_t solvings() const { return solvings_; }
    const TrailingParams& params() const { return params_; }
    const std::map<std::size_t, mpz_class>& pi_record() const { return pi_; }
    std::uint64_t lambda_hint() const { return lambda_hint_; }

private:
    TrailingParams params_;
    std::uint64_t lambda_hint_;
    Stopwatch* watch_;
    std::vector<RationalVector> pools_[2];
    mpz_class den_lcm_{1};       // s~: lcm of every solution denominator seen
    mpz_class known_divisor_{1}; // K: always divides det(A)
    std::map<std::size_t, mpz_class> pi_;
    std::size_t level_ = 1;
    std::size_t k_done_ = 0;
    std::size_t k_app_ = 0;
    int phase_ = 0;
    std::size_t solvings_ = 0;
};

}  // namespace zdet
