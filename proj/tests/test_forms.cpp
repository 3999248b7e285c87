#include <doctest.h>

#include <algorithm>
#include <queue>
#include <random>
#include <set>
#include <sstream>

#include "qforms/forms.hpp"

using namespace qforms;

namespace {

/* Forms reachable from f by S and T^{+-1} moves, bounded by coefficient height. */
bool equivalent_by_bfs(quad_form const & from, quad_form const & to, std::int64_t height)
{
    std::set<quad_form> seen{from};
    std::queue<quad_form> todo;
    todo.push(from);
    sl2z const moves[] = {{0, -1, 1, 0}, {1, 1, 0, 1}, {1, -1, 0, 1}};
    while (!todo.empty()) {
        auto f = todo.front();
        todo.pop();
        if (f == to)
            return true;
        for (auto const & m : moves) {
            auto g = apply(f, m);
            if (std::abs(g.a) > height || std::abs(g.b) > height || std::abs(g.c) > height)
                continue;
            if (seen.insert(g).second)
                todo.push(g);
        }
    }
    return false;
}

std::int64_t count_by_scan(quad_form const & f, std::int64_t n, std::int64_t bound)
{
    std::int64_t count = 0;
    for (std::int64_t x = -bound; x <= bound; ++x)
        for (std::int64_t y = -bound; y <= bound; ++y)
            if (f(x, y) == n)
                ++count;
    return count;
}

/* Reduced forms of discriminant q by scanning |b| <= a <= sqrt(|q|/3). */
std::vector<quad_form> reduced_forms_by_scan(std::int64_t q)
{
    std::vector<quad_form> out;
    for (std::int64_t a = 1; 3 * a * a <= -q; ++a)
        for (std::int64_t b = -a; b <= a; ++b) {
            std::int64_t num = b * b - q;
            if (num % (4 * a))
                continue;
            quad_form f{a, b, num / (4 * a)};
            if (f.is_reduced() && f.is_primitive())
                out.push_back(f);
        }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

TEST_CASE("reduce examples")
{
    auto r = reduce({1, 1, 6});
    CHECK(r.form == quad_form{1, 1, 6});
    CHECK(r.witness.det() == 1);

    r = reduce({6, 1, 1});
    CHECK(r.form == quad_form{1, 1, 6});
    CHECK(apply(quad_form{6, 1, 1}, r.witness) == r.form);
    CHECK(equivalent_by_bfs({6, 1, 1}, {1, 1, 6}, 12));

    CHECK(reduced({2, -1, 3}) == quad_form{2, -1, 3});
    CHECK(reduced({2, -2, 3}) == quad_form{2, 2, 3});
    CHECK(reduced({3, -1, 3}) == quad_form{3, 1, 3});

    CHECK_THROWS_AS(reduce({1, 3, 1}), std::invalid_argument);
    CHECK_THROWS_AS(reduce({2, 2, 2}), std::invalid_argument);

    std::ostringstream os;
    os << quad_form{2, -1, 3};
    CHECK(os.str() == "(2,-1,3)");
}

TEST_CASE("reduction witness under random SL2 twists")
{
    std::mt19937_64 rng(12345);
    std::uniform_int_distribution<int> pick(0, 2), shift(-3, 3);
    for (std::int64_t q : {-3, -4, -23, -47, -71, -84, -143, -420, -1155, -9956}) {
        for (auto const & base : reduced_forms_by_scan(q)) {
            for (int trial = 0; trial < 20; ++trial) {
                sl2z g{};
                for (int step = 0; step < 6; ++step) {
                    int kind = pick(rng);
                    sl2z m = kind == 0 ? sl2z{0, -1, 1, 0} : sl2z{1, shift(rng), 0, 1};
                    g = g * m;
                }
                auto twisted = apply(base, g);
                REQUIRE(twisted.discriminant() == q);
                auto r = reduce(twisted);
                REQUIRE(r.witness.det() == 1);
                REQUIRE(apply(twisted, r.witness) == r.form);
                REQUIRE(r.form.is_reduced());
                REQUIRE(r.form == base);
            }
        }
    }
}

TEST_CASE("class group examples")
{
    auto G3 = class_group(-3);
    CHECK(G3.h() == 1);
    CHECK(G3.classes[0] == quad_form{1, 1, 1});

    auto G = class_group(-23);
    REQUIRE(G.h() == 3);
    CHECK(G.classes[0] == quad_form{1, 1, 6});
    CHECK(G.classes[1] == quad_form{2, 1, 3});
    CHECK(G.classes[2] == quad_form{2, -1, 3});
    REQUIRE(G.cyclic.size() == 1);
    CHECK(G.cyclic[0].second == 3);
    auto A = G.index_of({2, 1, 3});
    auto B = G.index_of({2, -1, 3});
    CHECK(G.compose(G.principal, A) == A);
    CHECK(G.compose(A, B) == G.principal);
    CHECK(G.compose(A, A) == B);
    CHECK(G.power(A, 3) == G.principal);
    CHECK(G.e[G.principal] == 2);
    CHECK(G.e[A] == 1);

    auto G15 = class_group(-15);
    REQUIRE(G15.h() == 2);
    CHECK(G15.classes[0] == quad_form{1, 1, 4});
    CHECK(G15.classes[1] == quad_form{2, 1, 2});
    CHECK(G15.cyclic.size() == 1);
    CHECK(G15.cyclic[0].second == 2);

    CHECK_THROWS_AS(class_group(-12), std::invalid_argument);
    CHECK_THROWS_AS(class_group(5), std::invalid_argument);
    CHECK_NOTHROW(class_group(-8));
}

TEST_CASE("group axioms over D(500)")
{
    for (auto const & d : enumerate_df(500)) {
        auto G = class_group(d.q);
        auto const h = G.h();
        REQUIRE(static_cast<std::int64_t>(h) == class_number_formula(d.q));
        auto sorted_classes = G.classes;
        std::sort(sorted_classes.begin(), sorted_classes.end());
        REQUIRE(sorted_classes == reduced_forms_by_scan(d.q));
        std::uint64_t product = 1;
        for (auto [g, o] : G.cyclic)
            product *= o;
        REQUIRE(product == h);
        for (std::size_t j = 1; j < G.cyclic.size(); ++j)
            REQUIRE(G.cyclic[j].second % G.cyclic[j - 1].second == 0);

        for (class_index i = 0; i < h; ++i) {
            REQUIRE(G.compose(G.principal, i) == i);
            REQUIRE(G.compose(i, G.inverse(i)) == G.principal);
            REQUIRE(G.classes[G.inverse(i)] == reduced({G.classes[i].a, -G.classes[i].b, G.classes[i].c}));
            REQUIRE(G.power(i, G.orders[i]) == G.principal);
            REQUIRE(G.e[i] == (G.orders[i] <= 2 ? 2 : 1));
            /* coordinates reproduce the class */
            class_index rebuilt = G.principal;
            for (std::size_t j = 0; j < G.cyclic.size(); ++j)
                rebuilt = G.compose(rebuilt, G.power(G.cyclic[j].first, G.coords[i][j]));
            REQUIRE(rebuilt == i);
            for (class_index j = 0; j < h; ++j) {
                REQUIRE(G.compose(i, j) == G.compose(j, i));
                if (h <= 12)
                    for (class_index k = 0; k < h; ++k)
                        REQUIRE(G.compose(G.compose(i, j), k) == G.compose(i, G.compose(j, k)));
            }
        }
        /* composition agrees with the form law up to reduction */
        for (class_index i = 0; i < h; ++i) {
            auto f = compose_forms(G.classes[i], G.classes[(i + 1) % h]);
            REQUIRE(f.discriminant() == d.q);
            REQUIRE(G.index_of(f) == G.compose(i, (i + 1) % h));
        }
    }
}

TEST_CASE("representation count examples")
{
    CHECK(representation_count({1, 0, 1}, 3) == 0);
    CHECK(representation_count({1, 0, 1}, 5) == 8);
    CHECK(representation_count({1, 1, 6}, 23) == count_by_scan({1, 1, 6}, 23, 12));
    CHECK(representation_count({1, 1, 6}, 23) > 0);

    for (quad_form f : {quad_form{1, 0, 1}, quad_form{1, 1, 1}, quad_form{2, 1, 3}, quad_form{3, 2, 7},
                        quad_form{1, 0, 5}}) {
        auto bulk = representation_counts_upto(f, 400);
        for (std::int64_t n = 1; n <= 400; ++n) {
            REQUIRE(representation_count(f, n) == count_by_scan(f, n, 25));
            REQUIRE(bulk[n] == static_cast<std::uint32_t>(representation_count(f, n)));
        }
    }
}

TEST_CASE("representation counts sum to the divisor sum of the character")
{
    for (auto const & d : enumerate_df(300)) {
        auto G = class_group(d.q);
        std::vector<std::vector<std::uint32_t>> r;
        for (auto const & f : G.classes)
            r.push_back(representation_counts_upto(f, 600));
        for (std::int64_t n = 1; n <= 600; ++n) {
            std::int64_t total = 0;
            for (auto const & row : r)
                total += row[n];
            std::int64_t divisor_sum = 0;
            for (std::int64_t m = 1; m <= n; ++m)
                if (n % m == 0)
                    divisor_sum += kronecker(d.q, m);
            REQUIRE_MESSAGE(total == unit_count(d.q) * divisor_sum, "q=" << d.q << " n=" << n);
        }
    }
}

TEST_CASE("classes representing")
{
    auto G = class_group(-23);
    auto A = G.index_of({2, 1, 3});
    auto B = G.index_of({2, -1, 3});
    auto two = classes_representing(G, 2);
    std::sort(two.begin(), two.end());
    std::vector<class_index> ab{A, B};
    std::sort(ab.begin(), ab.end());
    CHECK(two == ab);
    CHECK(classes_representing(G, 23) == std::vector<class_index>{G.principal});
    CHECK(classes_representing(G, 5).empty());

    auto S = build_sieve(3000);
    for (auto const & d : enumerate_df(400)) {
        auto H = class_group(d.q);
        for (auto p : S.primes_up_to(3000)) {
            auto pc = prime_classes(H, p);
            auto rep = classes_representing(H, static_cast<std::int64_t>(p));
            std::sort(rep.begin(), rep.end());
            REQUIRE_MESSAGE(pc == rep, "q=" << d.q << " p=" << p);
        }
    }
}
