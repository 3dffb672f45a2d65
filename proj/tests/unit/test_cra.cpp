#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"
#include "zdet/cra.hpp"
#include "zdet/generators.hpp"
#include "zdet/oracles.hpp"

using namespace zdet;

TEST_CASE("reconstruction lands in the symmetric range") {
    CraState st(mpz_class(1000000), 2);
    st.update(5, 4);
    REQUIRE(st.value() == -1);  // 4 mod 5 in the symmetric range

    CraState st2(mpz_class(1000000), 2);
    st2.update(5, 2);
    st2.update(7, 2);
    REQUIRE(st2.value() == 2);
    REQUIRE(st2.stability() == 1);

    CraState st3(mpz_class(1000000), 2);
    st3.update(5, 3);
    st3.update(7, 6);
    REQUIRE(st3.value() == testsupport::brute_crt_symmetric({{5, 3}, {7, 6}}));
    REQUIRE(st3.value() == 13);
}

TEST_CASE("update rejects repeats and divisor clashes") {
    CraState st(mpz_class(1000), 2);
    st.update(5, 1);
    REQUIRE_THROWS_AS(st.update(5, 1), std::invalid_argument);
    st.set_divisor(mpz_class(7));
    REQUIRE_THROWS_AS(st.update(7, 3), std::invalid_argument);
}

TEST_CASE("divisor rescaling keeps the raw residues") {
    // det = 12, divisor 4: reconstruct 3
    CraState st(mpz_class(100), 2);
    st.update(5, 12 % 5);
    st.update(7, 12 % 7);
    REQUIRE(st.value() == 12);
    st.set_divisor(mpz_class(4));
    REQUIRE(st.value() == 3);
    REQUIRE(st.determinant() == 12);
    // brute: the unique x in (-17..17] with 4x = 12 mod 35
    mpz_class found = 99;
    for (long x = -17; x <= 17; ++x)
        if (((4 * x - 12) % 35 + 35) % 35 == 0) found = x;
    REQUIRE(st.value() == found);

    // identity divisor is a no-op on the value
    st.set_divisor(mpz_class(1));
    REQUIRE(st.value() == 12);

    // rebuilding from scratch with the same primes gives the same value
    CraState fresh(mpz_class(100), 2);
    fresh.update(5, 12 % 5);
    fresh.update(7, 12 % 7);
    fresh.set_divisor(mpz_class(1));
    REQUIRE(fresh.value() == st.value());
}

TEST_CASE("divisor sharing a stored prime evicts that pair") {
    CraState st(mpz_class(1000), 2);
    st.update(5, 2);
    st.update(7, 2);
    auto evicted = st.set_divisor(mpz_class(5));
    REQUIRE(evicted == std::vector<std::uint64_t>{5});
    REQUIRE(st.pair_count() == 1);
    REQUIRE(st.modulus() == 7);
}

TEST_CASE("early termination certifies when the modulus covers the bound") {
    CraState st(mpz_class(10), 2);
    st.update(524309, 7);
    REQUIRE(st.certified());
    REQUIRE(st.et_holds(0.5, 1000));  // regardless of stability
    REQUIRE(st.value() == 7);
}

TEST_CASE("zero stability never terminates probabilistically") {
    CraState st(mpz_class("100000000000000000000000000000000"), 2);
    st.update(524309, 7);
    REQUIRE(st.stability() == 0);
    REQUIRE(!st.et_holds(0.999, 100000));
}

TEST_CASE("stability ratio evaluates exactly") {
    // H=10^6, |r|=2, base modulus 35, l=2: R' = ceil(log2(1000002/35)) = 15
    // k=3, denominator factors 1000*999*998: ratio ~ 2.74e-6
    const mpz_class hpr = mpz_class(1000000) + 2;
    const mpz_class base = 35;
    REQUIRE(et_ratio_below(hpr, base, 2, 3, 997, 1e-5));
    REQUIRE(!et_ratio_below(hpr, base, 2, 3, 997, 1e-6));
    // the comparison is exact: ratio = 2730/997002000 ~ 2.7382e-6
    const double ratio = 2730.0 / 997002000.0;
    REQUIRE(et_ratio_below(hpr, base, 2, 3, 997, ratio * 1.001));
    REQUIRE(!et_ratio_below(hpr, base, 2, 3, 997, ratio * 0.999));
}

TEST_CASE("static stability count") {
    // P'/log_l(H) = 30: k = ceil(20 / log2(30)) = 5
    const mpz_class h = mpz_class(1) << 10;  // log_2 H = 10
    REQUIRE(et_static_count(h, 2, 310, 1.0 / 1048576.0) == 5);
    REQUIRE(et_static_count(h, 2, 310, 0.9) == 1);
    REQUIRE_THROWS_AS(et_static_count(h, 2, 15, 0.5), std::invalid_argument);
}

TEST_CASE("certified determinant equals the oracle") {
    PrimeSampler s = default_prime_sampler(11);
    REQUIRE(cra_det_certified(IntMatrix::identity(4), 1, s) == 1);
    IntMatrix a(2, 2);
    a(0, 0) = 1; a(0, 1) = 2; a(1, 0) = 3; a(1, 1) = 4;
    REQUIRE(cra_det_certified(a, 1, s) == -2);
    const IntMatrix r8 = gen_random(8, 16, 314);
    REQUIRE(cra_det_certified(r8, 1, s) == bareiss_det(r8));
}

TEST_CASE("certified determinant with a known divisor") {
    const IntMatrix a = gen_random(7, 16, 2718);
    const mpz_class det = bareiss_det(a);
    REQUIRE(det != 0);
    // use a small divisor of det
    mpz_class k = 1;
    for (long c : {2, 3, 5, 7, 11, 13})
        if (mpz_divisible_ui_p(det.get_mpz_t(), c)) k *= c;
    PrimeSampler s = default_prime_sampler(12);
    REQUIRE(cra_det_certified(a, k, s) * k == det);
}

TEST_CASE("certified CRA consumes no more primes than the bound requires") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const IntMatrix a = gen_random(14, 16, 660 + seed);
        PrimeSampler s = default_prime_sampler(seed);
        cra_det_certified(a, 1, s);
        // primes needed: smallest t with l^t >= 2H plus one for safety
        mpz_class h = hadamard_bound(a), t = 1;
        std::size_t need = 0;
        while (t < 2 * h) {
            t *= 524288;
            ++need;
        }
        REQUIRE(s.issued() <= need + 1);
    }
}

TEST_CASE("threaded certified CRA matches serial") {
    const IntMatrix a = gen_random(12, 16, 555);
    PrimeSampler s1 = default_prime_sampler(13), s2 = default_prime_sampler(13);
    REQUIRE(cra_det_certified(a, 1, s1, 1) == cra_det_certified(a, 1, s2, 4));
}

TEST_CASE("early termination matches the oracle across many runs") {
    const double eps = 1.0 / 1048576.0;
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        const std::size_t n = 2 + seed % 39;  // n <= 40
        const IntMatrix a = gen_random(n, 16, 86000 + seed);
        PrimeSampler s = default_prime_sampler(seed);
        REQUIRE(cra_det_early(a, 1, eps, s) == bareiss_det(a));
    }
}

TEST_CASE("early termination beats the certified bound when the det is small") {
    const double eps = 1.0 / 1048576.0;
    std::size_t fired_early = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const std::size_t n = 20 + seed % 21;  // det = +-1, bound is huge
        const IntMatrix a = gen_unimodular(n, 87000 + seed);
        PrimeSampler s = default_prime_sampler(seed);
        const mpz_class got = cra_det_early(a, 1, eps, s);
        REQUIRE(abs(got) == 1);
        mpz_class h = hadamard_bound(a);
        unsigned long certified_primes = 0;
        mpz_class t = 1;
        while (t < 2 * h) {
            t *= 524288;
            ++certified_primes;
        }
        if (s.issued() < certified_primes) ++fired_early;
    }
    REQUIRE(fired_early == 100);
}

TEST_CASE("symmetric range invariant holds after every update") {
    CraState st(mpz_class("1000000000000000000000000"), 524288);
    PrimeSampler s = default_prime_sampler(21);
    const IntMatrix a = gen_random(9, 16, 808);
    for (int i = 0; i < 12; ++i) {
        const std::uint64_t p = s.next();
        st.update(p, lu_det_mod_p(a, p));
        REQUIRE(2 * st.value() < st.modulus());
        REQUIRE(-2 * st.value() <= st.modulus());
    }
}
