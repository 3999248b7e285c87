#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "qforms/arith.hpp"

using namespace qforms;

namespace {

bool prime_by_trial(std::uint64_t n)
{
    if (n < 2)
        return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0)
            return false;
    return true;
}

/* (d/p) for an odd prime p via the number of square roots of d mod p. */
int legendre_by_roots(std::int64_t d, std::int64_t p)
{
    std::int64_t r = ((d % p) + p) % p;
    if (r == 0)
        return 0;
    int roots = 0;
    for (std::int64_t m = 0; m < p; ++m)
        if ((m * m) % p == r)
            ++roots;
    return roots - 1;
}

/* Kronecker symbol from its definition: multiplicative over n with (d/2) by d mod 8. */
int kronecker_by_definition(std::int64_t d, std::int64_t n)
{
    if (n == 0)
        return (d == 1 || d == -1) ? 1 : 0;
    int result = 1;
    for (std::int64_t p = 2; p <= n; ++p) {
        if (!prime_by_trial(static_cast<std::uint64_t>(p)))
            continue;
        while (n % p == 0) {
            n /= p;
            int v;
            if (p == 2) {
                if (d % 2 == 0)
                    v = 0;
                else {
                    std::int64_t m = ((d % 8) + 8) % 8;
                    v = (m == 1 || m == 7) ? 1 : -1;
                }
            } else {
                v = legendre_by_roots(d, p);
            }
            result *= v;
        }
    }
    return result;
}

bool squarefree_by_trial(std::int64_t n)
{
    n = n < 0 ? -n : n;
    for (std::int64_t d = 2; d * d <= n; ++d)
        if (n % (d * d) == 0)
            return false;
    return true;
}

/* Negative fundamental discriminants q, q not 0 mod 8, by the raw congruence filter. */
bool in_df_by_filter(std::int64_t q)
{
    std::int64_t m = ((q % 16) + 16) % 16;
    if (m % 4 == 1)
        return squarefree_by_trial(q);
    if (m % 4 == 0) {
        std::int64_t r = q / 4;
        std::int64_t rm = ((r % 4) + 4) % 4;
        return rm == 3 && squarefree_by_trial(r) && q % 8 != 0;
    }
    return false;
}

} // namespace

TEST_CASE("kronecker examples")
{
    CHECK(kronecker(-23, 1) == 1);
    CHECK(kronecker(5, 1) == 1);
    CHECK(kronecker(-3, 3) == 0);
    CHECK(kronecker(-4, 5) == 1);
    CHECK(kronecker(-4, 3) == -1);
    CHECK(kronecker(-1, 0) == 1);
    CHECK(kronecker(-3, 0) == 0);
    CHECK_THROWS_AS(kronecker(-3, -1), std::invalid_argument);
}

TEST_CASE("kronecker agrees with square-root counting")
{
    for (std::int64_t d = -200; d <= 200; ++d) {
        if (d == 0)
            continue;
        std::int64_t m = ((d % 4) + 4) % 4;
        if (m != 0 && m != 1)
            continue;
        for (std::int64_t n = 0; n <= 120; ++n)
            REQUIRE_MESSAGE(kronecker(d, n) == kronecker_by_definition(d, n), "d=" << d << " n=" << n);
    }
}

TEST_CASE("discriminant classification")
{
    CHECK(classify_discriminant(-7).kind == discriminant_kind::fundamental_in_df);
    CHECK(classify_discriminant(-8).kind == discriminant_kind::fundamental_excluded_mod8);
    CHECK(classify_discriminant(-12).kind == discriminant_kind::not_fundamental);
    CHECK(classify_discriminant(-4).kind == discriminant_kind::fundamental_in_df);
    CHECK(classify_discriminant(-24).kind == discriminant_kind::fundamental_excluded_mod8);
    CHECK(classify_discriminant(-5).kind == discriminant_kind::not_fundamental);
    CHECK(classify_discriminant(-3).abs_q == 3);
    CHECK_THROWS_AS(classify_discriminant(0), std::invalid_argument);
    CHECK_THROWS_AS(classify_discriminant(5), std::invalid_argument);
    CHECK(is_fundamental(5));
    CHECK(is_fundamental(8));
    CHECK(is_fundamental(-3));
    CHECK_FALSE(is_fundamental(1));
    CHECK_FALSE(is_fundamental(-12));
}

TEST_CASE("enumerate_df")
{
    CHECK(enumerate_df(2).empty());
    auto ten = enumerate_df(10);
    REQUIRE(ten.size() == 3);
    CHECK(ten[0].q == -3);
    CHECK(ten[1].q == -4);
    CHECK(ten[2].q == -7);

    for (double Q : {100.0, 1000.0, 2500.5}) {
        std::vector<std::int64_t> expected;
        for (std::int64_t a = 3; a <= static_cast<std::int64_t>(Q); ++a)
            if (in_df_by_filter(-a))
                expected.push_back(-a);
        auto got = enumerate_df(Q);
        REQUIRE(got.size() == expected.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].q == expected[i]);
            CHECK(got[i].in_df());
        }
    }
}

TEST_CASE("class number formula and unit counts")
{
    CHECK(unit_count(-3) == 6);
    CHECK(unit_count(-4) == 4);
    CHECK(unit_count(-7) == 2);
    CHECK(class_number_formula(-3) == 1);
    CHECK(class_number_formula(-4) == 1);
    CHECK(class_number_formula(-23) == 3);
    CHECK(class_number_formula(-15) == 2);
    CHECK(class_number_formula(-47) == 5);
    CHECK(class_number_formula(-71) == 7);
}

TEST_CASE("integer helpers")
{
    CHECK(isqrt(0) == 0);
    CHECK(isqrt(15) == 3);
    CHECK(isqrt(16) == 4);
    CHECK(isqrt(999999999999LL) == 999999);
    std::int64_t r = 0;
    CHECK(is_square(144, &r));
    CHECK(r == 12);
    CHECK_FALSE(is_square(145));
    CHECK(is_squarefree(30));
    CHECK_FALSE(is_squarefree(-12));
    CHECK(powmod(3, 100, 7) == 4);
    CHECK(mulmod(0xffffffffffffULL, 0xffffffffffffULL, 1000000007ULL)
          == static_cast<std::uint64_t>((static_cast<unsigned __int128>(0xffffffffffffULL)
                                         * 0xffffffffffffULL) % 1000000007ULL));
    for (std::uint64_t p : {3ULL, 5ULL, 13ULL, 17ULL, 41ULL, 97ULL, 1000003ULL})
        for (std::uint64_t a = 1; a < 60; ++a)
            if (legendre_by_roots(static_cast<std::int64_t>(a), static_cast<std::int64_t>(p)) == 1
                || a % p == 0) {
                auto s = sqrt_mod_prime(a, p);
                CHECK(mulmod(s, s, p) == a % p);
            }
}

TEST_CASE("sieve examples")
{
    auto S = build_sieve(100);
    CHECK_FALSE(S.lambda(6).nonzero());
    CHECK(S.lambda(8).p == 2);
    CHECK(S.lambda(8).exponent == 3);
    CHECK(S.lambda(8).log_value() == doctest::Approx(std::log(2.0)));
    CHECK_FALSE(S.lambda(1).nonzero());
    CHECK(S.prime_count(100) == 25);
    CHECK(S.prime_count(1) == 0);
    CHECK_THROWS_AS(S.is_prime(101), std::out_of_range);
    CHECK_THROWS(build_sieve(1));
}

TEST_CASE("sieve agrees with trial division")
{
    /* small segments and a low factor limit exercise both code paths */
    auto const N = 200'000;
    auto S = build_sieve(N, 1 << 12, 50'000);
    auto D = build_sieve(N);
    std::uint64_t count = 0;
    for (std::uint64_t n = 1; n <= N; ++n) {
        bool p = prime_by_trial(n);
        count += p;
        REQUIRE(S.is_prime(n) == p);
        REQUIRE(D.is_prime(n) == p);
        if (n % 97 == 0 || n < 2000) {
            REQUIRE(S.prime_count(n) == count);
            std::uint64_t m = n, tau = 1;
            int mu = 1;
            std::uint64_t spf = 0;
            for (std::uint64_t d = 2; d * d <= m; ++d) {
                unsigned e = 0;
                while (m % d == 0) {
                    m /= d;
                    ++e;
                }
                if (e) {
                    if (!spf)
                        spf = d;
                    tau *= e + 1;
                    mu = e > 1 ? 0 : -mu;
                }
            }
            if (m > 1) {
                if (!spf)
                    spf = m;
                tau *= 2;
                mu = -mu;
            }
            if (n > 1)
                REQUIRE(S.smallest_prime_factor(n) == spf);
            REQUIRE(S.tau(n) == tau);
            REQUIRE(S.mu(n) == mu);
            REQUIRE(S.tau(n) == D.tau(n));
        }
    }
    auto primes = S.primes_up_to(1000);
    CHECK(primes.size() == 168);
    std::uint64_t seen = 0;
    S.for_each_prime(100'000, 100'200, [&](std::uint64_t p) {
        CHECK(prime_by_trial(p));
        ++seen;
    });
    CHECK(seen == S.prime_count(100'200) - S.prime_count(99'999));
}

TEST_CASE("von Mangoldt on prime powers")
{
    auto S = build_sieve(5000);
    for (std::uint64_t n = 2; n <= 5000; ++n) {
        auto f = S.factor(n);
        auto L = S.lambda(n);
        if (f.size() == 1) {
            REQUIRE(L.p == f[0].first);
            REQUIRE(L.exponent == f[0].second);
        } else {
            REQUIRE_FALSE(L.nonzero());
        }
    }
}
