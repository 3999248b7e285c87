#include "qforms/forms.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace qforms {

namespace {

using i128 = __int128;

std::int64_t floor_div(std::int64_t a, std::int64_t b)
{
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0)))
        --q;
    return q;
}

i128 mod128(i128 a, i128 m)
{
    i128 r = a % m;
    return r < 0 ? r + m : r;
}

/* u a + v b = g = gcd(a, b) >= 0 */
std::int64_t ext_gcd(std::int64_t a, std::int64_t b, std::int64_t & u, std::int64_t & v)
{
    std::int64_t u0 = 1, v0 = 0, u1 = 0, v1 = 1;
    while (b != 0) {
        std::int64_t q = floor_div(a, b);
        std::int64_t r = a - q * b;
        a = b;
        b = r;
        std::int64_t t = u0 - q * u1;
        u0 = u1;
        u1 = t;
        t = v0 - q * v1;
        v0 = v1;
        v1 = t;
    }
    if (a < 0) {
        a = -a;
        u0 = -u0;
        v0 = -v0;
    }
    u = u0;
    v = v0;
    return a;
}

std::int64_t narrow(i128 x)
{
    if (x > INT64_MAX || x < INT64_MIN)
        throw std::overflow_error("form coefficient overflow");
    return static_cast<std::int64_t>(x);
}

/* ordering of class representatives: by a, then |b|, positive b first */
bool class_order(quad_form const & f, quad_form const & g)
{
    if (f.a != g.a)
        return f.a < g.a;
    std::int64_t fb = f.b < 0 ? -f.b : f.b, gb = g.b < 0 ? -g.b : g.b;
    if (fb != gb)
        return fb < gb;
    return f.b > g.b;
}

} // namespace

bool quad_form::is_primitive() const
{
    return std::gcd(std::gcd(a, b), c) == 1;
}

bool quad_form::is_reduced() const
{
    std::int64_t ab = b < 0 ? -b : b;
    if (!(ab <= a && a <= c))
        return false;
    if ((ab == a || a == c) && b < 0)
        return false;
    return true;
}

std::ostream & operator<<(std::ostream & os, quad_form const & f)
{
    return os << "(" << f.a << "," << f.b << "," << f.c << ")";
}

quad_form apply(quad_form const & f, sl2z const & g)
{
    i128 const a = f.a, b = f.b, c = f.c;
    i128 const p = g.m00, r = g.m01, s = g.m10, t = g.m11;
    /* f(p x + r y, s x + t y) */
    i128 na = a * p * p + b * p * s + c * s * s;
    i128 nb = 2 * a * p * r + b * (p * t + r * s) + 2 * c * s * t;
    i128 nc = a * r * r + b * r * t + c * t * t;
    return {narrow(na), narrow(nb), narrow(nc)};
}

reduction_result reduce(quad_form const & f)
{
    if (!f.is_positive_definite())
        throw std::invalid_argument("reduce: form is not positive definite");
    if (!f.is_primitive())
        throw std::invalid_argument("reduce: form is not primitive");

    quad_form g = f;
    sl2z w;
    for (;;) {
        if (!(-g.a < g.b && g.b <= g.a)) {
            std::int64_t k = floor_div(g.a - g.b, 2 * g.a);
            i128 nc = i128(g.a) * k * k + i128(g.b) * k + g.c;
            g.b += 2 * g.a * k;
            g.c = narrow(nc);
            w = w * sl2z{1, k, 0, 1};
        }
        if (g.a > g.c) {
            g = {g.c, -g.b, g.a};
            w = w * sl2z{0, -1, 1, 0};
            continue;
        }
        if (g.a == g.c && g.b < 0) {
            g.b = -g.b;
            w = w * sl2z{0, -1, 1, 0};
        }
        break;
    }
    return {g, w};
}

quad_form reduced(quad_form const & f)
{
    return reduce(f).form;
}

quad_form principal_form(std::int64_t q)
{
    std::int64_t r = q % 4;
    if (r == 0)
        return {1, 0, -q / 4};
    return {1, 1, (1 - q) / 4};
}

/* Dirichlet composition, following the two-step Euclidean formulation. */
quad_form compose_forms(quad_form const & f, quad_form const & g)
{
    if (f.discriminant() != g.discriminant())
        throw std::invalid_argument("compose_forms: discriminants differ");
    quad_form f1 = f, f2 = g;
    if (f1.a > f2.a)
        std::swap(f1, f2);
    std::int64_t const s = (f1.b + f2.b) / 2;
    std::int64_t const n = f2.b - s;

    std::int64_t y1, d;
    if (f2.a % f1.a == 0) {
        y1 = 0;
        d = f1.a;
    } else {
        std::int64_t u, v;
        d = ext_gcd(f2.a, f1.a, u, v);
        y1 = u;
    }

    std::int64_t x2, y2, d1;
    if (s % d == 0) {
        y2 = -1;
        x2 = 0;
        d1 = d;
    } else {
        std::int64_t u, v;
        d1 = ext_gcd(s, d, u, v);
        x2 = u;
        y2 = -v;
    }

    std::int64_t const v1 = f1.a / d1;
    std::int64_t const v2 = f2.a / d1;
    i128 r = mod128(i128(y1) * y2 * n - i128(x2) * f2.c, v1);
    i128 b3 = f2.b + 2 * i128(v2) * r;
    i128 a3 = i128(v1) * v2;
    i128 c3 = (i128(b3) * b3 - f.discriminant()) / (4 * a3);
    return {narrow(a3), narrow(b3), narrow(c3)};
}

std::int64_t representation_count(quad_form const & f, std::int64_t n)
{
    if (!f.is_positive_definite())
        throw std::invalid_argument("representation_count: form not positive definite");
    if (n <= 0)
        return n == 0 ? 1 : 0;
    std::int64_t const absd = -f.discriminant();
    i128 const bound = i128(4) * f.a * n;
    std::int64_t const ymax = isqrt(narrow(bound / absd));
    std::int64_t count = 0;
    for (std::int64_t y = -ymax; y <= ymax; ++y) {
        std::int64_t delta = narrow(bound - i128(absd) * y * y);
        std::int64_t s;
        if (!is_square(delta, &s))
            continue;
        if ((-f.b * y + s) % (2 * f.a) == 0)
            ++count;
        if (s != 0 && (-f.b * y - s) % (2 * f.a) == 0)
            ++count;
    }
    return count;
}

std::vector<std::uint32_t> representation_counts_upto(quad_form const & f, std::int64_t N)
{
    if (!f.is_positive_definite())
        throw std::invalid_argument("representation_counts_upto: form not positive definite");
    std::vector<std::uint32_t> r(static_cast<std::size_t>(std::max<std::int64_t>(N, 0)) + 1, 0);
    if (N < 1)
        return r;
    std::int64_t const absd = -f.discriminant();
    i128 const bound = i128(4) * f.a * N;
    for (std::int64_t y = -isqrt(narrow(bound / absd)); y * y * i128(absd) <= bound; ++y) {
        std::int64_t delta = narrow(bound - i128(absd) * y * y);
        std::int64_t s = isqrt(delta);
        std::int64_t lo = floor_div(-f.b * y - s, 2 * f.a) - 1;
        std::int64_t hi = floor_div(-f.b * y + s, 2 * f.a) + 1;
        for (std::int64_t x = lo; x <= hi; ++x) {
            i128 v = i128(f.a) * x * x + i128(f.b) * x * y + i128(f.c) * y * y;
            if (v >= 1 && v <= N)
                ++r[static_cast<std::size_t>(v)];
        }
    }
    return r;
}

class_index form_class_group::power(class_index i, std::uint64_t k) const
{
    class_index r = principal, base = i;
    while (k) {
        if (k & 1)
            r = compose(r, base);
        base = compose(base, base);
        k >>= 1;
    }
    return r;
}

class_index form_class_group::index_of(quad_form const & f) const
{
    quad_form g = reduced(f);
    auto it = std::lower_bound(classes.begin(), classes.end(), g, class_order);
    if (it == classes.end() || *it != g)
        throw std::invalid_argument("index_of: form not in class group");
    return static_cast<class_index>(it - classes.begin());
}

void form_class_group::finalize()
{
    std::size_t const n = h();
    principal = index_of(principal_form(disc.q));

    inverses.assign(n, 0);
    for (class_index i = 0; i < n; ++i)
        inverses[i] = index_of({classes[i].a, -classes[i].b, classes[i].c});

    orders.assign(n, 0);
    for (class_index i = 0; i < n; ++i) {
        std::uint32_t k = 1;
        for (class_index x = i; x != principal; x = compose(x, i))
            ++k;
        orders[i] = k;
    }
    e.assign(n, 1);
    for (class_index i = 0; i < n; ++i)
        e[i] = orders[i] <= 2 ? 2 : 1;

    /*
     * Greedy invariant-factor decomposition. S is the subgroup generated so
     * far (membership + coordinates). Pick the element of largest order in
     * G/S and correct it by an element of S so its order in G equals its
     * order in the quotient; that keeps the sum direct.
     */
    std::vector<std::pair<class_index, std::uint32_t>> gens;
    std::vector<std::vector<std::uint32_t>> c(n);
    std::vector<char> in_s(n, 0);
    in_s[principal] = 1;
    std::vector<class_index> members{principal};
    while (members.size() < n) {
        class_index best = 0;
        std::uint32_t best_order = 0;
        for (class_index x = 0; x < n; ++x) {
            std::uint32_t k = 1;
            for (class_index y = x; !in_s[y]; y = compose(y, x))
                ++k;
            if (k > best_order) {
                best_order = k;
                best = x;
            }
        }
        class_index target = inverse(power(best, best_order));
        class_index gen = best;
        bool found = false;
        for (class_index s : members) {
            if (power(s, best_order) == target) {
                gen = compose(best, s);
                found = true;
                break;
            }
        }
        if (!found)
            throw std::logic_error("cyclic decomposition: no order-preserving lift");

        std::vector<class_index> next;
        next.reserve(members.size() * best_order);
        std::uint32_t const slot = static_cast<std::uint32_t>(gens.size());
        for (class_index s : members) {
            class_index y = s;
            for (std::uint32_t j = 0; j < best_order; ++j) {
                auto coords_y = c[s];
                coords_y.resize(slot + 1, 0);
                coords_y[slot] = j;
                c[y] = std::move(coords_y);
                if (!in_s[y])
                    in_s[y] = 1;
                next.push_back(y);
                y = compose(y, gen);
            }
        }
        members = std::move(next);
        gens.emplace_back(gen, best_order);
    }
    /* emitted largest first; store as d1 | d2 | ... */
    std::reverse(gens.begin(), gens.end());
    for (auto & v : c) {
        v.resize(gens.size(), 0);
        std::reverse(v.begin(), v.end());
    }
    cyclic = std::move(gens);
    coords = std::move(c);
}

form_class_group class_group(std::int64_t q)
{
    discriminant d = classify_discriminant(q);
    if (!d.is_fundamental())
        throw std::invalid_argument("class_group: " + std::to_string(q)
                                    + " is not a fundamental discriminant");
    form_class_group G;
    G.disc = d;
    std::int64_t const absq = d.abs_q;
    for (std::int64_t a = 1; 3 * a * a <= absq; ++a) {
        for (std::int64_t b = -a + 1; b <= a; ++b) {
            if (((b - q) & 1) != 0)
                continue;
            std::int64_t num = b * b - q;
            if (num % (4 * a) != 0)
                continue;
            quad_form f{a, b, num / (4 * a)};
            if (f.is_reduced() && f.is_primitive())
                G.classes.push_back(f);
        }
    }
    std::sort(G.classes.begin(), G.classes.end(), class_order);

    std::size_t const h = G.classes.size();
    G.table.assign(h * h, 0);
    for (class_index i = 0; i < h; ++i) {
        for (class_index j = i; j < h; ++j) {
            class_index k = G.index_of(compose_forms(G.classes[i], G.classes[j]));
            G.table[i * h + j] = k;
            G.table[j * h + i] = k;
        }
    }
    G.finalize();
    return G;
}

std::vector<class_index> classes_representing(form_class_group const & G, std::int64_t n)
{
    std::vector<class_index> out;
    for (class_index i = 0; i < G.h(); ++i)
        if (representation_count(G.classes[i], n) > 0)
            out.push_back(i);
    return out;
}

std::vector<class_index> prime_classes(form_class_group const & G, std::uint64_t p)
{
    std::int64_t const q = G.q();
    std::int64_t const pp = static_cast<std::int64_t>(p);
    std::int64_t b = -1;
    if (p == 2) {
        for (std::int64_t t = 0; t < 4; ++t) {
            if (((t - q) & 1) != 0 || (t * t - q) % 8 != 0)
                continue;
            quad_form f{2, t, (t * t - q) / 8};
            if (f.is_primitive()) {
                b = t;
                break;
            }
        }
    } else {
        if (kronecker(q, pp) == -1)
            return {};
        std::int64_t qm = q % pp;
        if (qm < 0)
            qm += pp;
        b = static_cast<std::int64_t>(sqrt_mod_prime(static_cast<std::uint64_t>(qm), p));
        if (((b - q) & 1) != 0)
            b += pp;
    }
    if (b < 0)
        return {};
    quad_form f{pp, b, narrow((i128(b) * b - q) / (4 * i128(pp)))};
    class_index c = G.index_of(f);
    class_index ci = G.inverse(c);
    if (c == ci)
        return {c};
    return {std::min(c, ci), std::max(c, ci)};
}

} // namespace qforms
