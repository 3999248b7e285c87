#include "qforms/arith.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qforms {

namespace {

int jacobi_odd(std::uint64_t a, std::uint64_t n)
{
    int t = 1;
    a %= n;
    while (a != 0) {
        while ((a & 1) == 0) {
            a >>= 1;
            std::uint64_t r = n & 7;
            if (r == 3 || r == 5)
                t = -t;
        }
        std::swap(a, n);
        if ((a & 3) == 3 && (n & 3) == 3)
            t = -t;
        a %= n;
    }
    return n == 1 ? t : 0;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t m)
{
    std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

} // namespace

int kronecker(std::int64_t d, std::int64_t n)
{
    if (n < 0)
        throw std::invalid_argument("kronecker: n must be nonnegative");
    if (n == 0)
        return (d == 1 || d == -1) ? 1 : 0;

    int k = 1;
    std::uint64_t un = static_cast<std::uint64_t>(n);
    unsigned v = std::countr_zero(un);
    if (v > 0) {
        if ((d & 1) == 0)
            return 0;
        un >>= v;
        if (v & 1) {
            std::int64_t r = floor_mod(d, 8);
            if (r == 3 || r == 5)
                k = -k;
        }
    }
    /* un odd from here on */
    std::uint64_t a;
    if (d < 0) {
        a = static_cast<std::uint64_t>(-(d + 1)) + 1;
        if ((un & 3) == 3)
            k = -k;
    } else {
        a = static_cast<std::uint64_t>(d);
    }
    return k * jacobi_odd(a, un);
}

bool is_squarefree(std::int64_t n)
{
    if (n == 0)
        return false;
    std::uint64_t m = n < 0 ? static_cast<std::uint64_t>(-(n + 1)) + 1 : n;
    for (std::uint64_t p = 2; p * p <= m; p += (p == 2 ? 1 : 2)) {
        if (m % p == 0) {
            m /= p;
            if (m % p == 0)
                return false;
        }
    }
    return true;
}

bool is_fundamental(std::int64_t d)
{
    if (d == 0 || d == 1)
        return false;
    std::int64_t r = floor_mod(d, 4);
    if (r == 1)
        return is_squarefree(d);
    if (r == 0) {
        std::int64_t m = d / 4;
        std::int64_t rm = floor_mod(m, 4);
        return (rm == 2 || rm == 3) && is_squarefree(m);
    }
    return false;
}

discriminant classify_discriminant(std::int64_t d)
{
    if (d >= 0)
        throw std::invalid_argument("classify_discriminant: d must be negative, got "
                                    + std::to_string(d));
    discriminant out{d, discriminant_kind::not_fundamental, -d};
    if (is_fundamental(d))
        out.kind = floor_mod(d, 8) == 0 ? discriminant_kind::fundamental_excluded_mod8
                                        : discriminant_kind::fundamental_in_df;
    return out;
}

std::vector<discriminant> enumerate_df(double Q)
{
    std::vector<discriminant> out;
    if (!(Q >= 3))
        return out;
    auto const top = static_cast<std::int64_t>(std::floor(Q));
    for (std::int64_t a = 3; a <= top; ++a) {
        auto d = classify_discriminant(-a);
        if (d.in_df())
            out.push_back(d);
    }
    return out;
}

int unit_count(std::int64_t q)
{
    if (q == -3)
        return 6;
    if (q == -4)
        return 4;
    return 2;
}

std::int64_t class_number_formula(std::int64_t q)
{
    if (q >= 0)
        throw std::invalid_argument("class_number_formula: q must be negative");
    std::int64_t const a = -q;
    std::int64_t s = 0;
    for (std::int64_t k = 1; k < a; ++k)
        s += k * kronecker(q, k);
    std::int64_t const num = -unit_count(q) * s;
    if (num % (2 * a) != 0)
        throw std::logic_error("class_number_formula: non-integral value for "
                               + std::to_string(q));
    return num / (2 * a);
}

std::int64_t isqrt(std::int64_t n)
{
    if (n < 0)
        throw std::invalid_argument("isqrt of negative");
    auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && r * r > n)
        --r;
    while ((r + 1) * (r + 1) <= n)
        ++r;
    return r;
}

bool is_square(std::int64_t n, std::int64_t * root)
{
    if (n < 0)
        return false;
    std::int64_t r = isqrt(n);
    if (root)
        *root = r;
    return r * r == n;
}

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m)
{
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m)
{
    std::uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1)
            r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

std::uint64_t sqrt_mod_prime(std::uint64_t a, std::uint64_t p)
{
    a %= p;
    if (a == 0)
        return 0;
    if (powmod(a, (p - 1) / 2, p) != 1)
        throw std::invalid_argument("sqrt_mod_prime: not a quadratic residue");
    if ((p & 3) == 3)
        return powmod(a, (p + 1) / 4, p);

    /* Tonelli-Shanks */
    std::uint64_t s = p - 1;
    unsigned e = 0;
    while ((s & 1) == 0) {
        s >>= 1;
        ++e;
    }
    std::uint64_t z = 2;
    while (powmod(z, (p - 1) / 2, p) != p - 1)
        ++z;
    std::uint64_t x = powmod(a, (s + 1) / 2, p);
    std::uint64_t b = powmod(a, s, p);
    std::uint64_t g = powmod(z, s, p);
    unsigned r = e;
    while (b != 1) {
        unsigned m = 0;
        std::uint64_t t = b;
        while (t != 1) {
            t = mulmod(t, t, p);
            ++m;
        }
        std::uint64_t gs = g;
        for (unsigned i = 0; i + 1 < r - m; ++i)
            gs = mulmod(gs, gs, p);
        x = mulmod(x, gs, p);
        g = mulmod(gs, gs, p);
        b = mulmod(b, g, p);
        r = m;
    }
    return x;
}

double von_mangoldt::log_value() const
{
    return p == 0 ? 0.0 : std::log(static_cast<double>(p));
}

sieve_tables build_sieve(std::uint64_t N, std::size_t segment_length,
                         std::uint64_t factor_limit)
{
    if (N < 2)
        throw std::invalid_argument("build_sieve: N must be at least 2");
    if (N > std::numeric_limits<std::uint32_t>::max())
        throw std::invalid_argument("build_sieve: N exceeds 32-bit range");
    if (segment_length < 64)
        segment_length = 64;

    sieve_tables t;
    t.limit_ = N;
    t.factor_limit_ = std::min(N, factor_limit);

    std::uint64_t root = static_cast<std::uint64_t>(isqrt(static_cast<std::int64_t>(N)));
    {
        std::vector<bool> small(root + 1, true);
        for (std::uint64_t i = 2; i <= root; ++i) {
            if (!small[i])
                continue;
            t.base_primes_.push_back(static_cast<std::uint32_t>(i));
            for (std::uint64_t j = i * i; j <= root; j += i)
                small[j] = false;
        }
    }

    /* odd numbers 1, 3, 5, ... in segments of segment_length odd entries */
    std::uint64_t const n_odd = (N + 1) / 2;
    t.odd_prime_bits_.assign((n_odd + 63) / 64, 0);
    std::vector<char> seg;
    for (std::uint64_t lo_idx = 0; lo_idx < n_odd; lo_idx += segment_length) {
        std::uint64_t hi_idx = std::min<std::uint64_t>(n_odd, lo_idx + segment_length);
        seg.assign(hi_idx - lo_idx, 1);
        std::uint64_t const lo = 2 * lo_idx + 1;
        std::uint64_t const hi = 2 * (hi_idx - 1) + 1;
        for (std::uint32_t p : t.base_primes_) {
            if (p == 2)
                continue;
            std::uint64_t pp = std::uint64_t(p) * p;
            if (pp > hi)
                break;
            std::uint64_t start = std::max(pp, (lo + p - 1) / p * p);
            if ((start & 1) == 0)
                start += p;
            for (std::uint64_t m = start; m <= hi; m += 2 * p)
                seg[(m - lo) / 2] = 0;
        }
        if (lo_idx == 0)
            seg[0] = 0; // 1 is not prime
        for (std::uint64_t i = lo_idx; i < hi_idx; ++i)
            if (seg[i - lo_idx])
                t.odd_prime_bits_[i >> 6] |= std::uint64_t(1) << (i & 63);
    }

    /* linear sieve for smallest prime factors */
    std::uint64_t const F = t.factor_limit_;
    t.spf_.assign(F + 1, 0);
    std::vector<std::uint32_t> primes;
    for (std::uint64_t i = 2; i <= F; ++i) {
        if (t.spf_[i] == 0) {
            t.spf_[i] = static_cast<std::uint32_t>(i);
            primes.push_back(static_cast<std::uint32_t>(i));
        }
        for (std::uint32_t p : primes) {
            if (p > t.spf_[i] || i * p > F)
                break;
            t.spf_[i * p] = p;
        }
    }
    return t;
}

bool sieve_tables::is_prime(std::uint64_t n) const
{
    if (n > limit_)
        throw std::out_of_range("sieve_tables::is_prime: " + std::to_string(n)
                                + " beyond sieve limit " + std::to_string(limit_));
    if (n == 2)
        return true;
    if (n < 2 || (n & 1) == 0)
        return false;
    std::uint64_t i = n >> 1;
    return (odd_prime_bits_[i >> 6] >> (i & 63)) & 1;
}

std::uint64_t sieve_tables::smallest_prime_factor(std::uint64_t n) const
{
    if (n < 2)
        throw std::invalid_argument("smallest_prime_factor: n < 2");
    if (n <= factor_limit_)
        return spf_[n];
    if (n > limit_)
        throw std::out_of_range("smallest_prime_factor beyond sieve limit");
    for (std::uint32_t p : base_primes_) {
        if (std::uint64_t(p) * p > n)
            break;
        if (n % p == 0)
            return p;
    }
    return n;
}

std::vector<std::pair<std::uint64_t, unsigned>> sieve_tables::factor(std::uint64_t n) const
{
    std::vector<std::pair<std::uint64_t, unsigned>> out;
    if (n == 0)
        throw std::invalid_argument("factor: n = 0");
    while (n > 1) {
        std::uint64_t p = smallest_prime_factor(n);
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.emplace_back(p, e);
    }
    return out;
}

von_mangoldt sieve_tables::lambda(std::uint64_t n) const
{
    if (n > limit_)
        throw std::out_of_range("lambda beyond sieve limit");
    if (n < 2)
        return {};
    if (n <= factor_limit_) {
        std::uint64_t p = spf_[n];
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        if (n != 1)
            return {};
        return {static_cast<std::uint32_t>(p), e};
    }
    if (is_prime(n))
        return {static_cast<std::uint32_t>(n), 1};
    std::uint64_t p = smallest_prime_factor(n);
    unsigned e = 0;
    while (n % p == 0) {
        n /= p;
        ++e;
    }
    if (n != 1)
        return {};
    return {static_cast<std::uint32_t>(p), e};
}

std::uint64_t sieve_tables::tau(std::uint64_t n) const
{
    std::uint64_t t = 1;
    for (auto [p, e] : factor(n))
        t *= e + 1;
    return t;
}

int sieve_tables::mu(std::uint64_t n) const
{
    int m = 1;
    for (auto [p, e] : factor(n)) {
        if (e > 1)
            return 0;
        m = -m;
    }
    return m;
}

std::uint64_t sieve_tables::prime_count(std::uint64_t x) const
{
    if (x > limit_)
        throw std::out_of_range("prime_count beyond sieve limit");
    if (x < 2)
        return 0;
    std::uint64_t const last = (x - 1) / 2; // odd index of largest odd <= x
    std::uint64_t count = 1;                 // the prime 2
    std::uint64_t const full_words = (last + 1) / 64;
    for (std::uint64_t w = 0; w < full_words; ++w)
        count += std::popcount(odd_prime_bits_[w]);
    std::uint64_t rem = (last + 1) % 64;
    if (rem)
        count += std::popcount(odd_prime_bits_[full_words] & ((std::uint64_t(1) << rem) - 1));
    return count;
}

void sieve_tables::for_each_prime(std::uint64_t lo, std::uint64_t hi,
                                  std::function<void(std::uint64_t)> const & fn) const
{
    if (hi > limit_)
        throw std::out_of_range("for_each_prime beyond sieve limit");
    if (lo <= 2 && hi >= 2)
        fn(2);
    std::uint64_t start = std::max<std::uint64_t>(lo, 3) | 1;
    for (std::uint64_t n = start; n <= hi; n += 2) {
        std::uint64_t i = n >> 1;
        std::uint64_t word = odd_prime_bits_[i >> 6] >> (i & 63);
        if (word == 0) {
            /* skip to the next word boundary */
            n += 2 * (63 - (i & 63));
            continue;
        }
        if (word & 1)
            fn(n);
    }
}

std::vector<std::uint64_t> sieve_tables::primes_up_to(std::uint64_t x) const
{
    std::vector<std::uint64_t> out;
    for_each_prime(2, x, [&](std::uint64_t p) { out.push_back(p); });
    return out;
}

} // namespace qforms
