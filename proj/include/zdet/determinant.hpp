#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

#include "zdet/bounds.hpp"
#include "zdet/cra.hpp"
#include "zdet/int_matrix.hpp"
#include "zdet/modfield.hpp"
#include "zdet/rng.hpp"
#include "zdet/stopwatch.hpp"
#include "zdet/trailing.hpp"

namespace zdet {

enum class DetPath { early_cra, bonus_et, fallback_certified };

inline const char* to_string(DetPath p) {
    switch (p) {
        case DetPath::early_cra: return "early-cra";
        case DetPath::bonus_et: return "bonus-et";
        case DetPath::fallback_certified: return "fallback-certified";
    }
    return "?";
}

/// Determinant plus provenance: which path finished, how much work each
/// phase did, and the certification parameter. Probabilistic paths are wrong
/// with probability at most epsilon; the fallback path is deterministic.
struct DetReport {
    mpz_class det;
    DetPath path = DetPath::early_cra;
    std::size_t solvings = 0;
    std::size_t primes_used = 0;
    std::size_t cra_pairs = 0;  // residues held at the end; reused across divisor changes
    std::size_t known_divisor_bits = 0;
    double epsilon = 0;
    std::map<std::string, double> timings_ms;
    mpz_class known_divisor{1};  // K: accumulated divisor of det(A)
    mpz_class den_lcm{1};        // s~: lcm of solution denominators seen
};

struct DetOptions {
    double epsilon = 1.0 / 1048576.0;  // 2^-20
    std::uint64_t seed = 0;
    unsigned prime_bits = 19;  // prime window (2^bits, 2^(bits+1))
    std::optional<std::size_t> min_level;
    std::optional<std::size_t> max_level;
    std::optional<std::uint64_t> lambda_hint;  // entry-set size, when known
    bool adaptive_switch = false;  // timing-ratio stabilization instead of equality
    unsigned threads = 1;
};

/// Timing-ratio rule: the bits gained by the last solving were cheap to get
/// by modular iterations instead when
///     log2(pi_i / pi_prev) <= (time(solving) / time(LU)) * log2(l).
/// True tells the controller to prefer CRA budgets over further solvings.
inline bool lu_switch_condition(const mpz_class& pi_i, const mpz_class& pi_prev,
                                const Stopwatch& sw, std::uint64_t prime_lower) {
    if (pi_i < 1 || pi_prev < 1) throw std::invalid_argument("lu_switch_condition: pi values must be >= 1");
    if (!sw.primed()) throw std::logic_error("lu_switch_condition: stopwatch not primed");
    const double gained = log2_approx(pi_i) - log2_approx(pi_prev);
    const double threshold =
        sw.mean(Stopwatch::Kind::solving) / sw.mean(Stopwatch::Kind::modular_lu) * std::log2(double(prime_lower));
    return gained <= threshold;
}

struct BudgetOutcome {
    bool terminated = false;
    std::size_t iterations = 0;
};

/// Resume CRA on det(A)/K for at most `budget_seconds`: whole
/// lu_det_mod_p + update iterations only, never preempted mid-iteration, at
/// least one performed. Reports whether the early-termination rule fired.
inline BudgetOutcome cra_budget_run(CraState& st, const IntMatrix& a, double budget_seconds,
                                    PrimeSampler& sampler, Stopwatch& sw, double epsilon) {
    BudgetOutcome out;
    const double start = monotonic_seconds();
    for (;;) {
        const std::uint64_t p = sampler.next_coprime(st.divisor());
        const double t0 = monotonic_seconds();
        const std::uint64_t d = lu_det_mod_p(a, p);
        sw.record(Stopwatch::Kind::modular_lu, monotonic_seconds() - t0);
        st.update(p, d);
        ++out.iterations;
        if (st.et_holds(epsilon, sampler.remaining())) {
            out.terminated = true;
            return out;
        }
        const double next_cost = sw.mean(Stopwatch::Kind::modular_lu);
        if (monotonic_seconds() - start + next_cost > budget_seconds) return out;
    }
}

namespace detail {

inline void complete_certified(CraState& st, const IntMatrix& a, PrimeSampler& sampler,
                               Stopwatch* sw, unsigned threads) {
    while (!st.certified()) {
        if (threads <= 1) {
            const std::uint64_t p = sampler.next_coprime(st.divisor());
            const double t0 = monotonic_seconds();
            const std::uint64_t d = lu_det_mod_p(a, p);
            if (sw) sw->record(Stopwatch::Kind::modular_lu, monotonic_seconds() - t0);
            st.update(p, d);
            continue;
        }
        std::vector<std::uint64_t> batch;
        for (unsigned i = 0; i < 2 * threads; ++i) batch.push_back(sampler.next_coprime(st.divisor()));
        std::vector<std::uint64_t> dets(batch.size());
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < threads; ++w)
            pool.emplace_back([&, w]() {
                for (std::size_t idx = w; idx < batch.size(); idx += threads)
                    dets[idx] = lu_det_mod_p(a, batch[idx]);
            });
        for (auto& th : pool) th.join();
        for (std::size_t idx = 0; idx < batch.size() && !st.certified(); ++idx)
            st.update(batch[idx], dets[idx]);
    }
}

}  // namespace detail

/// Complete an existing reconstruction to full certification
/// (modulus >= 2H/K), reusing every stored residue; returns the exact
/// determinant. The worst-case exit of the adaptive algorithm.
inline mpz_class fallback_certified(const IntMatrix& a, CraState& st, PrimeSampler& sampler,
                                    unsigned threads = 1) {
    detail::complete_certified(st, a, sampler, nullptr, threads);
    return st.determinant();
}

/// Introspective determinant: early-terminated Chinese remaindering and
/// p-adic trailing-factor extraction interleaved under timing budgets, with
/// a certified-CRA fallback. Exact with probability at least 1 - epsilon;
/// the fallback path is always exact.
inline DetReport determinant(const IntMatrix& a, const DetOptions& opts = {}) {
    if (!a.square()) throw std::invalid_argument("determinant: matrix not square");
    if (!(opts.epsilon > 0 && opts.epsilon < 1)) throw std::invalid_argument("determinant: bad epsilon");
    DetReport rep;
    rep.epsilon = opts.epsilon;
    const std::size_t n = a.rows();
    if (n == 0) {
        rep.det = 1;
        return rep;
    }

    // half the failure budget goes to ET decisions, the other half covers the
    // under-approximation side, so the end-to-end failure stays below epsilon
    const double eps_et = opts.epsilon / 2;

    Rng master(opts.seed);
    Rng rng_solve = master.fork(1);
    PrimeSampler sampler(std::uint64_t(1) << opts.prime_bits,
                         std::uint64_t(1) << (opts.prime_bits + 1), master.fork(2).next());
    Stopwatch sw;

    const mpz_class H = hadamard_bound(a);
    CraState st(H, sampler.lower());

    auto finish = [&](DetPath path, const TrailingState* trail) {
        rep.det = st.determinant();
        rep.path = path;
        rep.primes_used = sampler.issued();
        rep.cra_pairs = st.pair_count();
        rep.known_divisor = st.divisor();
        rep.known_divisor_bits =
            rep.known_divisor == 1 ? 0 : mpz_sizeinbase(rep.known_divisor.get_mpz_t(), 2);
        if (trail) {
            rep.solvings = trail->solvings();
            rep.den_lcm = trail->den_lcm();
        }
        return rep;
    };

    const std::size_t k0 = et_static_count(H, sampler.lower(), sampler.population(), eps_et);

    // Initial phase: k0 stable steps suffice for the static rule; the dynamic
    // rule is tested after every update. A few extra iterations absorb the
    // ceiling slack between the two rules. Also calibrates the LU time.
    {
        const double t0 = monotonic_seconds();
        for (std::size_t i = 0; i < k0 + 4 && !st.certified(); ++i) {
            const std::uint64_t p = sampler.next();
            const double lu0 = monotonic_seconds();
            const std::uint64_t d = lu_det_mod_p(a, p);
            sw.record(Stopwatch::Kind::modular_lu, monotonic_seconds() - lu0);
            st.update(p, d);
            if (st.et_holds(eps_et, sampler.remaining())) {
                rep.timings_ms["initial_cra"] = (monotonic_seconds() - t0) * 1e3;
                return finish(DetPath::early_cra, nullptr);
            }
        }
        // A zero reconstruction never justifies solving: a singular matrix
        // must exit through the CRA path. Keep adding primes until the rule
        // fires or the bound certifies.
        while (st.value() == 0 && !st.certified()) {
            const std::uint64_t p = sampler.next();
            st.update(p, lu_det_mod_p(a, p));
            if (st.et_holds(eps_et, sampler.remaining())) break;
        }
        rep.timings_ms["initial_cra"] = (monotonic_seconds() - t0) * 1e3;
        if (st.certified() || (st.value() == 0 && st.et_holds(eps_et, sampler.remaining())))
            return finish(DetPath::early_cra, nullptr);
    }

    // Trailing-factor phase.
    std::uint64_t lambda = 2;
    if (opts.lambda_hint) {
        lambda = std::max<std::uint64_t>(2, *opts.lambda_hint);
    } else {
        const mpz_class nn = 2 * a.norm();
        lambda = nn.fits_ulong_p() ? std::max<std::uint64_t>(2, nn.get_ui())
                                   : (std::uint64_t(1) << 62);
    }
    TrailingParams params = trailing_params(a, lambda);
    if (opts.min_level) params.min_level = std::max<std::size_t>(1, *opts.min_level);
    if (opts.max_level) params.max_level = *opts.max_level;
    if (params.max_level < params.min_level) params.max_level = params.min_level;

    TrailingState trail(params, lambda, &sw);
    const double bonus_t0 = monotonic_seconds();
    bool to_fallback = false;
    while (!to_fallback) {
        if (trail.k_done() >= params.max_level) {
            to_fallback = true;
            break;
        }
        double gain_threshold = 0.0;
        if (opts.adaptive_switch && sw.primed())
            gain_threshold = sw.mean(Stopwatch::Kind::solving) /
                             sw.mean(Stopwatch::Kind::modular_lu) * std::log2(double(sampler.lower()));
        TrailingState::Step step;
        try {
            step = trail.round(a, sampler, rng_solve, gain_threshold);
        } catch (const SingularMatrix&) {
            // r != 0 proved det != 0, so three singular primes in a row is
            // sampler bad luck; the certified completion settles it exactly
            to_fallback = true;
            break;
        }
        if (trail.known_divisor() != st.divisor()) st.set_divisor(trail.known_divisor());

        const double budget = sw.mean(Stopwatch::Kind::solving);
        if (cra_budget_run(st, a, budget, sampler, sw, eps_et).terminated) {
            rep.timings_ms["bonus"] = (monotonic_seconds() - bonus_t0) * 1e3;
            return finish(DetPath::bonus_et, &trail);
        }

        switch (step) {
            case TrailingState::Step::advanced:
                if (trail.level() > params.max_level) to_fallback = true;  // budget exhausted
                break;
            case TrailingState::Step::stabilized_new:
                break;
            case TrailingState::Step::stabilized_confirmed: {
                const std::size_t i = trail.level();
                const double big =
                    budget * double(params.max_level > i ? params.max_level - i : 1);
                if (cra_budget_run(st, a, big, sampler, sw, eps_et).terminated) {
                    rep.timings_ms["bonus"] = (monotonic_seconds() - bonus_t0) * 1e3;
                    return finish(DetPath::bonus_et, &trail);
                }
                if (trail.k_done() >= params.max_level)
                    to_fallback = true;
                else
                    trail.jump_to_max();
                break;
            }
        }
    }
    rep.timings_ms["bonus"] = (monotonic_seconds() - bonus_t0) * 1e3;

    const double fb0 = monotonic_seconds();
    detail::complete_certified(st, a, sampler, &sw, opts.threads);
    rep.timings_ms["fallback_cra"] = (monotonic_seconds() - fb0) * 1e3;
    DetReport r = finish(DetPath::fallback_certified, &trail);
    return r;
}

}  // namespace zdet
