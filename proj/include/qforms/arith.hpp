#ifndef QFORMS_ARITH_HPP
#define QFORMS_ARITH_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace qforms {

/* Kronecker symbol (d/n) for n >= 0. At n = 0 the value is 1 iff |d| = 1. */
int kronecker(std::int64_t d, std::int64_t n);

enum class discriminant_kind {
    fundamental_in_df,       // the set 𝒟: fundamental, q ≢ 0 mod 8
    fundamental_excluded_mod8,
    not_fundamental,
};

struct discriminant {
    std::int64_t q;
    discriminant_kind kind;
    std::int64_t abs_q;

    bool is_fundamental() const { return kind != discriminant_kind::not_fundamental; }
    bool in_df() const { return kind == discriminant_kind::fundamental_in_df; }

    friend bool operator==(discriminant const &, discriminant const &) = default;
};

/* Throws std::invalid_argument for d >= 0. */
discriminant classify_discriminant(std::int64_t d);

/* Fundamental discriminant test for either sign; 1 is not fundamental. */
bool is_fundamental(std::int64_t d);

/* All q in 𝒟 with |q| <= Q, ascending in |q|. */
std::vector<discriminant> enumerate_df(double Q);

/* Trial-division squarefree test, valid for any nonzero n. */
bool is_squarefree(std::int64_t n);

/* Number of units of the imaginary quadratic order of discriminant q. */
int unit_count(std::int64_t q);

/*
 * h(q) from the finite class number formula
 * -(w / (2|q|)) sum_{a=1}^{|q|-1} a (q/a). Throws std::logic_error if the
 * sum is not an integer multiple, which cannot happen for fundamental q.
 */
std::int64_t class_number_formula(std::int64_t q);

std::int64_t isqrt(std::int64_t n);
bool is_square(std::int64_t n, std::int64_t * root = nullptr);

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m);
std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m);

/* A square root of a mod p for an odd prime p, given (a/p) != -1. */
std::uint64_t sqrt_mod_prime(std::uint64_t a, std::uint64_t p);

/* Λ(n) = log p for n = p^e. p = 0 encodes Λ(n) = 0. */
struct von_mangoldt {
    std::uint32_t p = 0;
    std::uint32_t exponent = 0;

    bool nonzero() const { return p != 0; }
    double log_value() const;
};

/*
 * Prime and factorization tables up to a limit N.
 *
 * Primality is stored as a bitset over odd integers, filled by a
 * segmented sieve. Smallest prime factors are materialized only up to
 * factor_limit; above it factorization falls back to trial division by
 * the stored primes, so queries stay total on 1..N.
 */
class sieve_tables
{
  public:
    static constexpr std::size_t default_segment_length = std::size_t(1) << 20;
    static constexpr std::uint64_t default_factor_limit = 10'000'000;

    std::uint64_t limit() const { return limit_; }

    bool is_prime(std::uint64_t n) const;
    std::uint64_t smallest_prime_factor(std::uint64_t n) const;
    von_mangoldt lambda(std::uint64_t n) const;

    /* Ascending (prime, exponent) pairs. */
    std::vector<std::pair<std::uint64_t, unsigned>> factor(std::uint64_t n) const;
    std::uint64_t tau(std::uint64_t n) const;
    int mu(std::uint64_t n) const;

    std::uint64_t prime_count(std::uint64_t x) const;
    void for_each_prime(std::uint64_t lo, std::uint64_t hi,
                        std::function<void(std::uint64_t)> const & fn) const;
    std::vector<std::uint64_t> primes_up_to(std::uint64_t x) const;

    friend sieve_tables build_sieve(std::uint64_t N, std::size_t segment_length,
                                    std::uint64_t factor_limit);

  private:
    std::uint64_t limit_ = 0;
    std::uint64_t factor_limit_ = 0;
    std::vector<std::uint64_t> odd_prime_bits_;   // bit i <-> 2i+1
    std::vector<std::uint32_t> spf_;              // 0..factor_limit_
    std::vector<std::uint32_t> base_primes_;      // primes <= sqrt(limit_)
};

/* Throws std::invalid_argument for N < 2. */
sieve_tables build_sieve(std::uint64_t N,
                         std::size_t segment_length = sieve_tables::default_segment_length,
                         std::uint64_t factor_limit = sieve_tables::default_factor_limit);

} // namespace qforms

#endif
