#include <catch2/catch_amalgamated.hpp>

#include "zdet/determinant.hpp"
#include "zdet/generators.hpp"
#include "zdet/oracles.hpp"

using namespace zdet;

TEST_CASE("identity exits on the certified bound with no solving") {
    const DetReport r = determinant(IntMatrix::identity(5));
    REQUIRE(r.det == 1);
    REQUIRE(r.path == DetPath::early_cra);
    REQUIRE(r.solvings == 0);
}

TEST_CASE("unimodular matrices terminate early") {
    const IntMatrix u = gen_unimodular(30, 17);
    const DetReport r = determinant(u);
    REQUIRE(abs(r.det) == 1);
    REQUIRE(r.det == bareiss_det(u));
    REQUIRE(r.path == DetPath::early_cra);
}

TEST_CASE("random matrices match the oracle on any path") {
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const IntMatrix a = gen_random(50, 16, 7000 + seed);
        DetOptions o;
        o.seed = seed;
        const DetReport r = determinant(a, o);
        REQUIRE(r.det == bareiss_det(a));
    }
}

TEST_CASE("engineered matrices exercise deeper machinery") {
    const IntMatrix a = gen_engineered(40, 5);
    DetOptions o;
    o.seed = 5;
    const DetReport r = determinant(a, o);
    mpz_class fact = 1;
    for (long i = 2; i <= 40; ++i) fact *= i;
    REQUIRE(abs(r.det) == fact);
    REQUIRE(r.det == bareiss_det(a));
}

TEST_CASE("zero and singular matrices exit through the residue path") {
    const DetReport rz = determinant(IntMatrix(6, 6));
    REQUIRE(rz.det == 0);
    REQUIRE(rz.path == DetPath::early_cra);
    REQUIRE(rz.solvings == 0);

    IntMatrix s(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) s(i, j) = (i + 1) * (j + 2);
    const DetReport rs = determinant(s);
    REQUIRE(rs.det == 0);
    REQUIRE(rs.solvings == 0);
}

TEST_CASE("options are validated") {
    REQUIRE_THROWS_AS(determinant(IntMatrix(2, 3)), std::invalid_argument);
    DetOptions bad;
    bad.epsilon = 0;
    REQUIRE_THROWS_AS(determinant(IntMatrix::identity(2), bad), std::invalid_argument);
}

TEST_CASE("budget run always makes progress and stays resumable") {
    const IntMatrix a = gen_random(20, 16, 99);
    Stopwatch sw;
    // zero budget still performs exactly one whole iteration
    {
        CraState st(hadamard_bound(a), 524288);
        PrimeSampler s = default_prime_sampler(1);
        const BudgetOutcome out = cra_budget_run(st, a, 0.0, s, sw, 1e-9);
        REQUIRE(out.iterations == 1);
        REQUIRE(st.pair_count() == 1);
    }
    // the prime/residue sequence is a function of the sampler stream alone:
    // many tiny budget runs replay one long run
    {
        CraState st1(hadamard_bound(a), 524288);
        PrimeSampler s1 = default_prime_sampler(2);
        while (st1.pair_count() < 6) cra_budget_run(st1, a, 0.0, s1, sw, 1e-12);

        CraState st2(hadamard_bound(a), 524288);
        PrimeSampler s2 = default_prime_sampler(2);
        cra_budget_run(st2, a, 1e9, s2, sw, 1e-12);  // big budget; ET fires first
        REQUIRE(st2.pair_count() >= 6);
        for (std::size_t i = 0; i < 6; ++i) {
            REQUIRE(st1.pairs()[i].p == st2.pairs()[i].p);
            REQUIRE(st1.pairs()[i].residue == st2.pairs()[i].residue);
        }
    }
}

TEST_CASE("budget run finishes tiny cofactors within the stability window") {
    // det/K = +-1 with residues already stored: the stable reconstruction
    // only needs the stability count before the rule fires
    const IntMatrix u = gen_unimodular(35, 451);
    Stopwatch sw;
    CraState st(hadamard_bound(u), 524288);
    PrimeSampler s = default_prime_sampler(9);
    for (int i = 0; i < 2; ++i) {
        const std::uint64_t p = s.next();
        st.update(p, lu_det_mod_p(u, p));
    }
    const std::size_t k =
        et_static_count(hadamard_bound(u), s.lower(), s.population(), 1.0 / 1048576.0);
    const BudgetOutcome out = cra_budget_run(st, u, 1e9, s, sw, 1.0 / 1048576.0);
    REQUIRE(out.terminated);
    REQUIRE(out.iterations <= k + 2);
    REQUIRE(abs(st.determinant()) == 1);
}

TEST_CASE("timing-ratio switch condition") {
    Stopwatch sw;
    sw.record(Stopwatch::Kind::solving, 10.0);
    sw.record(Stopwatch::Kind::modular_lu, 1.0);
    const std::uint64_t l = 1 << 19;
    // threshold = 10 * 19 = 190 bits
    REQUIRE(lu_switch_condition(mpz_class(5), mpz_class(5), sw, l));  // equal: always true
    const mpz_class big200 = mpz_class(1) << 200, one = 1;
    REQUIRE(!lu_switch_condition(big200, one, sw, l));  // gained 200 bits: keep solving
    const mpz_class big50 = mpz_class(1) << 50;
    REQUIRE(lu_switch_condition(big50, one, sw, l));  // gained 50 bits: switch to CRA
    Stopwatch empty;
    REQUIRE_THROWS_AS(lu_switch_condition(one, one, empty, l), std::logic_error);
}

TEST_CASE("fallback completes an existing state exactly") {
    const IntMatrix a = gen_engineered(30, 8);
    PrimeSampler s = default_prime_sampler(3);
    CraState st(hadamard_bound(a), s.lower());
    for (int i = 0; i < 3; ++i) {
        const std::uint64_t p = s.next();
        st.update(p, lu_det_mod_p(a, p));
    }
    const std::size_t before = st.pair_count();
    const mpz_class det = fallback_certified(a, st, s);
    REQUIRE(det == bareiss_det(a));
    REQUIRE(st.pair_count() > before);  // reused the stored residues, added the rest
    // already certified: immediate return, no extra primes
    const std::size_t primes_used = s.issued();
    REQUIRE(fallback_certified(a, st, s) == det);
    REQUIRE(s.issued() == primes_used);
}

TEST_CASE("starved trailing search exits through the certified fallback") {
    // p times a dense unimodular matrix: all invariant factors equal p, so
    // one solving recovers only a single factor; with the level capped at 1
    // the remaining cofactor p^(n-1) is far too large for the budgeted ET
    // windows and the run must finish on the certified path
    const mpz_class p("17592186044423");  // 2^44 + 7
    const IntMatrix u = gen_unimodular(100, 6);
    IntMatrix a(100, 100);
    for (std::size_t i = 0; i < 100; ++i)
        for (std::size_t j = 0; j < 100; ++j) a(i, j) = p * u(i, j);
    DetOptions o;
    o.seed = 3;
    o.max_level = 1;
    o.min_level = 1;
    const DetReport r = determinant(a, o);
    mpz_class want;
    mpz_pow_ui(want.get_mpz_t(), p.get_mpz_t(), 100);
    if (bareiss_det(u) < 0) want = -want;
    REQUIRE(r.det == want);
    REQUIRE(r.path == DetPath::fallback_certified);
    REQUIRE(r.known_divisor == p);  // one solving found exactly one factor

    // residue reuse: the final state holds no more pairs than a from-scratch
    // certified run on det/K would need
    mpz_class twoh = 2 * hadamard_bound(a), t = 1;
    mpz_cdiv_q(twoh.get_mpz_t(), twoh.get_mpz_t(), p.get_mpz_t());
    std::size_t need = 0;
    while (t < twoh) {
        t *= 524288;
        ++need;
    }
    REQUIRE(r.cra_pairs <= need + 1);
}

TEST_CASE("adaptive switch stays correct") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const IntMatrix a = gen_engineered(24, 400 + seed);
        DetOptions o;
        o.seed = seed;
        o.adaptive_switch = true;
        REQUIRE(determinant(a, o).det == bareiss_det(a));
    }
}

TEST_CASE("level overrides narrow the search") {
    const IntMatrix a = gen_random(36, 16, 2024);
    DetOptions o;
    o.max_level = 1;
    o.min_level = 1;
    const DetReport r = determinant(a, o);
    REQUIRE(r.det == bareiss_det(a));
    REQUIRE(r.solvings <= 1);
}

TEST_CASE("report carries the work provenance") {
    const IntMatrix a = gen_random(32, 16, 11);
    const DetReport r = determinant(a);
    REQUIRE(r.primes_used > 0);
    REQUIRE(r.epsilon == 1.0 / 1048576.0);
    if (r.path != DetPath::early_cra) {
        REQUIRE(r.solvings > 0);
        REQUIRE(mpz_divisible_p(r.det.get_mpz_t(), r.known_divisor.get_mpz_t()));
        REQUIRE(mpz_divisible_p(r.known_divisor.get_mpz_t(), r.den_lcm.get_mpz_t()));
    }
}
