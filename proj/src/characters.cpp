#include "qforms/characters.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

namespace qforms {

std::pair<std::uint64_t, std::uint64_t>
class_character::phase(std::vector<std::uint32_t> const & coords) const
{
    if (moduli.empty())
        return {0, 1};
    std::uint64_t const L = moduli.back();
    std::uint64_t num = 0;
    for (std::size_t j = 0; j < moduli.size(); ++j)
        num = (num + std::uint64_t(exponents[j]) * coords[j] * (L / moduli[j])) % L;
    std::uint64_t g = std::gcd(num, L);
    return {num / g, L / g};
}

std::complex<double> class_character::value(form_class_group const & G, class_index c) const
{
    auto [num, den] = phase(G.coords[c]);
    if (num == 0)
        return {1.0, 0.0};
    if (den == 2)
        return {-1.0, 0.0};
    double const t = 2.0 * std::numbers::pi * static_cast<double>(num) / static_cast<double>(den);
    return {std::cos(t), std::sin(t)};
}

int class_character::real_value(form_class_group const & G, class_index c) const
{
    if (!is_real)
        throw std::invalid_argument("real_value: character is complex");
    auto [num, den] = phase(G.coords[c]);
    return num == 0 ? 1 : -1;
}

class_character class_character::conjugate() const
{
    class_character out = *this;
    for (std::size_t j = 0; j < moduli.size(); ++j)
        out.exponents[j] = (moduli[j] - exponents[j]) % moduli[j];
    return out;
}

std::vector<class_character> characters(form_class_group const & G)
{
    std::vector<std::uint32_t> moduli;
    for (auto const & [gen, ord] : G.cyclic)
        moduli.push_back(ord);

    std::uint64_t total = 1;
    for (auto m : moduli)
        total *= m;

    std::vector<class_character> out;
    out.reserve(total);
    for (std::uint64_t idx = 0; idx < total; ++idx) {
        class_character chi;
        chi.q = G.q();
        chi.moduli = moduli;
        chi.exponents.assign(moduli.size(), 0);
        std::uint64_t rest = idx;
        for (std::size_t j = moduli.size(); j-- > 0;) {
            chi.exponents[j] = static_cast<std::uint32_t>(rest % moduli[j]);
            rest /= moduli[j];
        }
        for (std::size_t j = 0; j < moduli.size(); ++j) {
            if (chi.exponents[j] != 0)
                chi.is_trivial = false;
            if ((2 * chi.exponents[j]) % moduli[j] != 0)
                chi.is_real = false;
        }
        out.push_back(std::move(chi));
    }
    return out;
}

std::vector<class_character> complex_characters(form_class_group const & G)
{
    std::vector<class_character> out;
    for (auto & chi : characters(G))
        if (!chi.is_real)
            out.push_back(std::move(chi));
    return out;
}

namespace {

std::vector<std::pair<std::int64_t, unsigned>> trial_factor(std::int64_t m)
{
    std::vector<std::pair<std::int64_t, unsigned>> out;
    for (std::int64_t p = 2; p * p <= m; ++p) {
        if (m % p != 0)
            continue;
        unsigned l = 0;
        while (m % p == 0) {
            m /= p;
            ++l;
        }
        out.emplace_back(p, l);
    }
    if (m > 1)
        out.emplace_back(m, 1);
    return out;
}

w_table build_lattice(form_class_group const & G, std::int64_t N)
{
    w_table W;
    W.q = G.q();
    W.N = N;
    W.h = G.h();
    W.w.assign(W.h * static_cast<std::size_t>(N + 1), 0);
    std::uint32_t const units = static_cast<std::uint32_t>(unit_count(G.q()));
    for (class_index c = 0; c < G.h(); ++c) {
        auto r = representation_counts_upto(G.classes[c], N);
        for (std::int64_t n = 1; n <= N; ++n) {
            if (r[n] % units != 0)
                throw std::logic_error("w_table: representation count " + std::to_string(r[n])
                                       + " not divisible by unit count");
            W.at(c, n) = r[n] / units;
        }
    }
    return W;
}

/*
 * Each n is a product of prime powers; the ideals of norm p^l sit in the
 * classes P^(2i-l) (split), P^l (ramified) or the principal class (inert,
 * l even). Their class distribution is the group convolution over the
 * prime powers of n.
 */
w_table build_multiplicative(form_class_group const & G, std::int64_t N)
{
    w_table W;
    W.q = G.q();
    W.N = N;
    W.h = G.h();
    W.w.assign(W.h * static_cast<std::size_t>(N + 1), 0);

    std::size_t const h = G.h();
    std::map<std::int64_t, class_index> prime_class;
    auto class_of_prime = [&](std::int64_t p) -> std::optional<class_index> {
        auto it = prime_class.find(p);
        if (it != prime_class.end())
            return it->second;
        auto cs = classes_representing(G, p);
        if (cs.empty())
            return std::nullopt;
        prime_class.emplace(p, cs.front());
        return cs.front();
    };

    std::vector<std::uint32_t> dist(h), next(h);
    for (std::int64_t n = 1; n <= N; ++n) {
        std::fill(dist.begin(), dist.end(), 0);
        dist[G.principal] = 1;
        bool zero = false;
        for (auto [p, l] : trial_factor(n)) {
            int const chi = kronecker(G.q(), p);
            std::fill(next.begin(), next.end(), 0);
            if (chi == -1) {
                if (l % 2 == 1) {
                    zero = true;
                    break;
                }
                continue;
            }
            auto P = class_of_prime(p);
            if (!P)
                throw std::logic_error("w_table: non-inert prime " + std::to_string(p)
                                       + " represented by no class");
            if (chi == 0) {
                class_index shift = G.power(*P, l);
                for (class_index c = 0; c < h; ++c)
                    next[G.compose(c, shift)] += dist[c];
            } else {
                class_index Pinv = G.inverse(*P);
                for (unsigned i = 0; i <= l; ++i) {
                    class_index shift = G.compose(G.power(*P, i), G.power(Pinv, l - i));
                    for (class_index c = 0; c < h; ++c)
                        next[G.compose(c, shift)] += dist[c];
                }
            }
            dist.swap(next);
        }
        if (zero)
            continue;
        for (class_index c = 0; c < h; ++c)
            W.at(c, n) = dist[c];
    }
    return W;
}

} // namespace

w_table build_w_table(form_class_group const & G, std::int64_t N, w_mode mode)
{
    if (N < 1)
        throw std::invalid_argument("build_w_table: N must be positive");
    return mode == w_mode::lattice ? build_lattice(G, N) : build_multiplicative(G, N);
}

std::complex<double> lambda_chi(class_character const & chi, form_class_group const & G,
                                w_table const & W, std::int64_t n)
{
    if (n < 1 || n > W.N)
        throw std::out_of_range("lambda_chi: n = " + std::to_string(n) + " outside table 1.."
                                + std::to_string(W.N));
    if (chi.q != W.q)
        throw std::invalid_argument("lambda_chi: character and table discriminants differ");
    std::complex<double> s = 0;
    for (class_index c = 0; c < G.h(); ++c) {
        std::uint32_t w = W(c, n);
        if (w)
            s += static_cast<double>(w) * chi.value(G, c);
    }
    return s;
}

std::int64_t lambda_real(class_character const & chi, form_class_group const & G,
                         w_table const & W, std::int64_t n)
{
    if (n < 1 || n > W.N)
        throw std::out_of_range("lambda_real: n outside table");
    std::int64_t s = 0;
    for (class_index c = 0; c < G.h(); ++c) {
        std::uint32_t w = W(c, n);
        if (w)
            s += static_cast<std::int64_t>(w) * chi.real_value(G, c);
    }
    return s;
}

std::vector<std::complex<double>> lambda_series(class_character const & chi,
                                                form_class_group const & G, w_table const & W)
{
    std::vector<std::complex<double>> values(G.h());
    for (class_index c = 0; c < G.h(); ++c)
        values[c] = chi.value(G, c);
    std::vector<std::complex<double>> out(static_cast<std::size_t>(W.N) + 1, 0.0);
    for (class_index c = 0; c < G.h(); ++c)
        for (std::int64_t n = 1; n <= W.N; ++n)
            if (std::uint32_t w = W(c, n))
                out[n] += static_cast<double>(w) * values[c];
    return out;
}

std::int64_t kronecker_convolution(std::int64_t d1, std::int64_t d2, std::int64_t n)
{
    std::int64_t s = 0;
    for (std::int64_t k = 1; k * k <= n; ++k) {
        if (n % k != 0)
            continue;
        s += kronecker(d1, k) * kronecker(d2, n / k);
        if (k * k != n)
            s += kronecker(d1, n / k) * kronecker(d2, k);
    }
    return s;
}

namespace {

std::vector<std::int64_t> convolution_series(std::int64_t d1, std::int64_t d2, std::int64_t N)
{
    std::vector<int> a(N + 1), b(N + 1);
    for (std::int64_t n = 1; n <= N; ++n) {
        a[n] = kronecker(d1, n);
        b[n] = kronecker(d2, n);
    }
    std::vector<std::int64_t> out(N + 1, 0);
    for (std::int64_t k = 1; k <= N; ++k) {
        if (a[k] == 0)
            continue;
        for (std::int64_t m = 1; k * m <= N; ++m)
            out[k * m] += a[k] * b[m];
    }
    return out;
}

} // namespace

std::pair<std::int64_t, std::int64_t> kronecker_factorize(class_character const & chi,
                                                          form_class_group const & G,
                                                          w_table const & W)
{
    if (!chi.is_real)
        throw std::invalid_argument("kronecker_factorize: character is complex");
    std::int64_t const q = G.q();

    std::vector<std::int64_t> lam(W.N + 1, 0);
    for (std::int64_t n = 1; n <= W.N; ++n)
        lam[n] = lambda_real(chi, G, W, n);

    std::vector<std::pair<std::int64_t, std::int64_t>> candidates;
    if (chi.is_trivial) {
        candidates.emplace_back(1, q);
    } else {
        std::int64_t const a = -q;
        for (std::int64_t d = 2; d < a; ++d) {
            if (a % d != 0)
                continue;
            for (std::int64_t d1 : {d, -d}) {
                std::int64_t d2 = q / d1;
                if (std::abs(d1) > std::abs(d2))
                    continue;
                if (is_fundamental(d1) && is_fundamental(d2))
                    candidates.emplace_back(d1, d2);
            }
        }
    }

    std::vector<std::pair<std::int64_t, std::int64_t>> matches;
    for (auto [d1, d2] : candidates) {
        auto conv = convolution_series(d1, d2, W.N);
        bool ok = true;
        for (std::int64_t n = 1; n <= W.N && ok; ++n)
            ok = conv[n] == lam[n];
        if (ok)
            matches.emplace_back(d1, d2);
    }
    if (matches.size() != 1)
        throw std::logic_error("kronecker_factorize: " + std::to_string(matches.size())
                               + " factorizations of " + std::to_string(q)
                               + " verify on 1.." + std::to_string(W.N));
    return matches.front();
}

} // namespace qforms
