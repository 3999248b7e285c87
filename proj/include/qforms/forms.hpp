#ifndef QFORMS_FORMS_HPP
#define QFORMS_FORMS_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "qforms/arith.hpp"

namespace qforms {

/* The form a x^2 + b x y + c y^2. */
struct quad_form {
    std::int64_t a = 1, b = 0, c = 1;

    std::int64_t discriminant() const { return b * b - 4 * a * c; }
    bool is_positive_definite() const { return a > 0 && discriminant() < 0; }
    bool is_primitive() const;

    /*
     * Reduced means |b| <= a <= c, with b >= 0 whenever |b| = a or a = c.
     */
    bool is_reduced() const;

    std::int64_t operator()(std::int64_t x, std::int64_t y) const
    {
        return a * x * x + b * x * y + c * y * y;
    }

    friend auto operator<=>(quad_form const &, quad_form const &) = default;
};

std::ostream & operator<<(std::ostream & os, quad_form const & f);

/* Integer matrix [[m00, m01], [m10, m11]] acting as (x, y) -> (m00 x + m01 y, m10 x + m11 y). */
struct sl2z {
    std::int64_t m00 = 1, m01 = 0, m10 = 0, m11 = 1;

    std::int64_t det() const { return m00 * m11 - m01 * m10; }
    sl2z operator*(sl2z const & o) const
    {
        return {m00 * o.m00 + m01 * o.m10, m00 * o.m01 + m01 * o.m11,
                m10 * o.m00 + m11 * o.m10, m10 * o.m01 + m11 * o.m11};
    }
    friend bool operator==(sl2z const &, sl2z const &) = default;
};

/* (f o g)(x, y) = f(g(x, y)). */
quad_form apply(quad_form const & f, sl2z const & g);

struct reduction_result {
    quad_form form;
    sl2z witness; // apply(input, witness) == form
};

/* Throws std::invalid_argument for indefinite or imprimitive input. */
reduction_result reduce(quad_form const & f);
quad_form reduced(quad_form const & f);

/* Principal form of discriminant q. */
quad_form principal_form(std::int64_t q);

/* Dirichlet composition of two forms of the same discriminant, not reduced. */
quad_form compose_forms(quad_form const & f, quad_form const & g);

/*
 * Counts all (x, y) in Z^2 with f(x, y) = n, including x = 0, y = 0
 * and imprimitive pairs. f must be positive definite.
 */
std::int64_t representation_count(quad_form const & f, std::int64_t n);

/*
 * Counts r(n) = #{(x, y) : f(x, y) = n} for every 0 < n <= N at once by
 * lattice enumeration. Index 0 of the result is unused.
 */
std::vector<std::uint32_t> representation_counts_upto(quad_form const & f, std::int64_t N);

using class_index = std::uint32_t;

class form_class_group
{
  public:
    discriminant disc;
    std::vector<quad_form> classes;           // reduced representatives
    std::vector<class_index> table;           // h*h composition table
    class_index principal = 0;
    std::vector<class_index> inverses;
    std::vector<std::uint32_t> orders;
    std::vector<int> e;                        // 2 if order <= 2 else 1
    /* cyclic factors as (generator, order), orders d1 | d2 | ... */
    std::vector<std::pair<class_index, std::uint32_t>> cyclic;
    /* coordinates of each class against the cyclic generators */
    std::vector<std::vector<std::uint32_t>> coords;

    std::size_t h() const { return classes.size(); }
    std::int64_t q() const { return disc.q; }

    class_index compose(class_index i, class_index j) const { return table[i * h() + j]; }
    class_index inverse(class_index i) const { return inverses[i]; }
    class_index power(class_index i, std::uint64_t k) const;

    /* Index of the reduced form equal to reduce(f); throws if absent. */
    class_index index_of(quad_form const & f) const;

    /* Rebuilds derived tables from classes and table. */
    void finalize();
};

/*
 * All reduced forms of discriminant q with the composition law and
 * cyclic decomposition. Throws std::invalid_argument unless q is a
 * negative fundamental discriminant.
 */
form_class_group class_group(std::int64_t q);

/* Classes C with representation_count(C, n) > 0. */
std::vector<class_index> classes_representing(form_class_group const & G, std::int64_t n);

/*
 * The class(es) of the prime ideals above p as the reduced form (p, b, c);
 * returns the pair {C, C^-1} (equal when self-inverse), or nothing when p is
 * inert. p must be prime.
 */
std::vector<class_index> prime_classes(form_class_group const & G, std::uint64_t p);

} // namespace qforms

#endif
