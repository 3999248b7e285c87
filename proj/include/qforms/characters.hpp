#ifndef QFORMS_CHARACTERS_HPP
#define QFORMS_CHARACTERS_HPP

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "qforms/forms.hpp"

namespace qforms {

/*
 * A character of the class group, given by exponents e_j against the
 * cyclic factors (g_j, d_j): chi(C) = exp(2 pi i sum_j e_j c_j(C) / d_j).
 */
struct class_character {
    std::int64_t q = 0;
    std::vector<std::uint32_t> exponents;
    std::vector<std::uint32_t> moduli;     // the cyclic orders d_j
    bool is_trivial = true;
    bool is_real = true;                   // chi^2 = chi_0

    /* chi(C) as a fraction num/den of a full turn, reduced mod 1. */
    std::pair<std::uint64_t, std::uint64_t> phase(std::vector<std::uint32_t> const & coords) const;
    std::complex<double> value(form_class_group const & G, class_index c) const;
    /* Exact +-1 value; requires is_real. */
    int real_value(form_class_group const & G, class_index c) const;

    class_character conjugate() const;
};

/* All h(q) characters, the trivial one first. */
std::vector<class_character> characters(form_class_group const & G);

/* Characters with chi^2 != chi_0. */
std::vector<class_character> complex_characters(form_class_group const & G);

/*
 * w(C, n) for every class C and 1 <= n <= N: the number of integral
 * ideals of norm n in the ideal class matching C.
 */
class w_table
{
  public:
    std::int64_t q = 0;
    std::int64_t N = 0;
    std::size_t h = 0;
    std::vector<std::uint32_t> w;   // row-major, h rows of N + 1 entries

    std::uint32_t operator()(class_index c, std::int64_t n) const
    {
        return w[c * static_cast<std::size_t>(N + 1) + static_cast<std::size_t>(n)];
    }
    std::uint32_t & at(class_index c, std::int64_t n)
    {
        return w[c * static_cast<std::size_t>(N + 1) + static_cast<std::size_t>(n)];
    }

    friend bool operator==(w_table const &, w_table const &) = default;
};

enum class w_mode {
    lattice,         // representation counts divided by the unit count
    multiplicative,  // assembled from prime-ideal classes
};

w_table build_w_table(form_class_group const & G, std::int64_t N, w_mode mode = w_mode::lattice);

/* lambda_chi(n) = sum_C chi(C) w(C, n). Throws std::out_of_range past the table. */
std::complex<double> lambda_chi(class_character const & chi, form_class_group const & G,
                                w_table const & W, std::int64_t n);

/* Exact lambda_chi(n) for a real character. */
std::int64_t lambda_real(class_character const & chi, form_class_group const & G,
                         w_table const & W, std::int64_t n);

/* lambda_chi(1..N), index 0 unused. */
std::vector<std::complex<double>> lambda_series(class_character const & chi,
                                                form_class_group const & G, w_table const & W);

/* (chi_d1 * chi_d2)(n) as a Dirichlet convolution of Kronecker symbols. */
std::int64_t kronecker_convolution(std::int64_t d1, std::int64_t d2, std::int64_t n);

/*
 * The pair (d1, d2) of fundamental discriminants (or d1 = 1) with
 * d1 d2 = q and lambda_chi = chi_d1 * chi_d2, verified on 1..W.N.
 * Throws std::invalid_argument for a complex character and
 * std::logic_error when no factorization verifies.
 */
std::pair<std::int64_t, std::int64_t> kronecker_factorize(class_character const & chi,
                                                          form_class_group const & G,
                                                          w_table const & W);

} // namespace qforms

#endif
