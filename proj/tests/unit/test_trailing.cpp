#include <catch2/catch_amalgamated.hpp>

#include "zdet/bounds.hpp"
#include "zdet/generators.hpp"
#include "zdet/oracles.hpp"
#include "zdet/trailing.hpp"

using namespace zdet;

TEST_CASE("expected factor count bound") {
    REQUIRE(expected_factor_count(200, 4) == 6);    // ceil(sqrt(2*log_4 200)) + 3
    REQUIRE(expected_factor_count(10000, 16) == 6);
    REQUIRE(expected_factor_count(2, 8) >= 4);
    REQUIRE(expected_factor_count(50, 1) == expected_factor_count(50, 2));  // clamp
}

TEST_CASE("parameter formulas") {
    const IntMatrix a = gen_random(16, 16, 4);
    TrailingParams p = trailing_params(a, 16);
    REQUIRE(p.min_level == 2);
    REQUIRE(p.max_level >= p.min_level);
    const std::size_t e = expected_factor_count(16, 16);
    REQUIRE(p.max_level == std::max<std::size_t>(2, e));
    const mpz_class lg(ceil_log2(hadamard_bound(a)));
    REQUIRE(p.entry_range == 13 * mpz_class(e) * e * e * lg * lg * lg * lg);
}

namespace {

TrailingParams small_params(const mpz_class& range, std::size_t max_level) {
    TrailingParams p;
    p.entry_range = range;
    p.min_level = 2;
    p.max_level = max_level;
    return p;
}

}  // namespace

TEST_CASE("first level records the denominator lcm") {
    const IntMatrix a = IntMatrix::identity(5);
    TrailingState st(small_params(64, 3), 16);
    PrimeSampler s = default_prime_sampler(5);
    Rng rng(5);
    const auto step = st.round(a, s, rng);
    REQUIRE(step == TrailingState::Step::advanced);
    REQUIRE(st.den_lcm() == 1);
    REQUIRE(st.known_divisor() == 1);
    REQUIRE(st.pi_record().at(1) == 1);
    REQUIRE(st.solvings() == 1);
}

TEST_CASE("level estimates divide the true trailing products") {
    // smith form (1,...,1,4,12): pi_1 = 12, pi_2 = 48
    std::vector<mpz_class> d{1, 1, 1, 4, 12};
    const IntMatrix a = IntMatrix::diagonal(d);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        TrailingState st(small_params(1 << 12, 4), 16);
        PrimeSampler s = default_prime_sampler(seed);
        Rng rng(seed);
        st.round(a, s, rng);  // level 1
        st.round(a, s, rng);  // level 2
        const mpz_class pi2 = st.pi_record().at(2);
        REQUIRE(mpz_divisible_p(mpz_class(48).get_mpz_t(), pi2.get_mpz_t()));
        REQUIRE(mpz_divisible_p(mpz_class(12 * 48).get_mpz_t(), st.known_divisor().get_mpz_t()));
    }
}

TEST_CASE("direct pi estimate at level one") {
    std::vector<mpz_class> d{1, 1, 6};
    const IntMatrix a = IntMatrix::diagonal(d);
    TrailingState st(small_params(1 << 10, 3), 8);
    PrimeSampler s = default_prime_sampler(77);
    Rng rng(77);
    st.extend(a, s, rng);
    const auto [pi1, confirmed] = st.pi_estimate(1, s, rng);
    REQUIRE(confirmed);
    REQUIRE(mpz_divisible_p(mpz_class(6).get_mpz_t(), pi1.get_mpz_t()));
    REQUIRE(mpz_divisible_p(st.den_lcm().get_mpz_t(), pi1.get_mpz_t()));  // pi~_1 | s~
}

TEST_CASE("known divisor always divides the determinant") {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        const std::size_t n = 4 + seed % 5;
        const IntMatrix a = gen_random(n, 16, 60000 + seed);
        const mpz_class det = bareiss_det(a);
        if (det == 0) continue;
        TrailingState st(small_params(mpz_class(1) << 16, 3), 16);
        PrimeSampler s = default_prime_sampler(seed + 40);
        Rng rng(seed + 40);
        for (int round = 0; round < 3; ++round) {
            st.round(a, s, rng);
            REQUIRE(mpz_divisible_p(det.get_mpz_t(), st.known_divisor().get_mpz_t()));
            REQUIRE(mpz_divisible_p(det.get_mpz_t(), st.den_lcm().get_mpz_t()));
        }
    }
}

TEST_CASE("engineered matrices grow the divisor toward n factorial") {
    const IntMatrix a = gen_engineered(10, 123);
    mpz_class fact = 1;
    for (long i = 2; i <= 10; ++i) fact *= i;
    TrailingState st(small_params(mpz_class(1) << 20, 4), 4);
    PrimeSampler s = default_prime_sampler(9);
    Rng rng(9);
    mpz_class last = 1;
    for (int round = 0; round < 4; ++round) {
        st.round(a, s, rng);
        REQUIRE(mpz_divisible_p(fact.get_mpz_t(), st.known_divisor().get_mpz_t()));
        REQUIRE(mpz_divisible_p(st.known_divisor().get_mpz_t(), last.get_mpz_t()));  // monotone
        last = st.known_divisor();
    }
    REQUIRE(st.known_divisor() > 1);
}

TEST_CASE("stabilization flips the phase and requires confirmation") {
    // nearly-identity matrix: every pi estimate is 1, so the first eligible
    // level stabilizes, flips phase, and the second phase confirms
    const IntMatrix a = IntMatrix::identity(6);
    TrailingState st(small_params(256, 4), 8);
    PrimeSampler s = default_prime_sampler(31);
    Rng rng(31);
    REQUIRE(st.round(a, s, rng) == TrailingState::Step::advanced);       // level 1
    REQUIRE(st.round(a, s, rng) == TrailingState::Step::advanced);       // level 2 (== min_level)
    REQUIRE(st.round(a, s, rng) == TrailingState::Step::stabilized_new); // level 3
    REQUIRE(st.phase() == 1);
    REQUIRE(st.k_app() == 3);
    REQUIRE(st.k_done() == 0);
    REQUIRE(st.level() == 1);
    // fresh pool, same outcome, confirmation at level 3
    REQUIRE(st.round(a, s, rng) == TrailingState::Step::advanced);
    REQUIRE(st.round(a, s, rng) == TrailingState::Step::advanced);
    REQUIRE(st.round(a, s, rng) == TrailingState::Step::stabilized_confirmed);
    REQUIRE(st.k_done() == 3);
    REQUIRE(st.k_done() <= st.k_app());
    REQUIRE(st.known_divisor() == 1);
}
