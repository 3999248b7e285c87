#ifndef QFORMS_STATS_HPP
#define QFORMS_STATS_HPP

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qforms/arith.hpp"
#include "qforms/characters.hpp"
#include "qforms/forms.hpp"

namespace qforms {

struct stat_config {
    double c3 = 20.0;                 // exceptional-discriminant constant
    std::uint32_t y_grid_count = 64;
    double li_tolerance = 1e-10;
    double A = 1.0;                   // log power in the normalization
    double eps = 0.1;
    unsigned threads = 1;

    void validate() const;
};

/* li(X) = integral_2^X dt / log t. Throws for X < 2. */
double li(double X, double tolerance = 1e-10);

/* Number of primes p <= X represented by each class. */
std::vector<std::uint64_t> prime_class_counts(form_class_group const & G, sieve_tables const & S,
                                              std::uint64_t X);

/* #{p <= X : C represents p}. */
std::uint64_t pi_repr(sieve_tables const & S, std::uint64_t X, form_class_group const & G,
                      class_index C);

/*
 * Both sides of sum_C e(C) pi(X;q,C) - #{p <= X : p | q} = sum_{p <= X} (1 + (q/p)).
 */
struct average_identity {
    std::int64_t weighted_count;
    std::int64_t kronecker_sum;
    bool holds() const { return weighted_count == kronecker_sum; }
};
average_identity check_average_identity(form_class_group const & G, sieve_tables const & S,
                                        std::uint64_t X);

/* Prime powers n <= N with their Lambda(n). */
struct prime_power {
    std::uint64_t n;
    double log_p;
};
std::vector<prime_power> prime_powers(sieve_tables const & S, std::uint64_t N);

/* (1/k!) sum_{n <= Y} Lambda(n) (log Y/n)^k w(C, n). */
double psi_k(double Y, form_class_group const & G, class_index C, unsigned k, w_table const & W,
             sieve_tables const & S);

/* psi_k(Y; q, chi) = (1/k!) sum_{n <= Y} Lambda(n) lambda_chi(n) (log Y/n)^k. */
std::complex<double> psi_k_chi(double Y, class_character const & chi, form_class_group const & G,
                               unsigned k, w_table const & W, sieve_tables const & S);

/*
 * max_C max_{Y <= X} |psi_k(Y;q,C) - (1/h) sum_K psi_k(Y;q,K)| with Y on
 * the grid j X / y_grid_count, plus every prime power n <= X when k = 0.
 */
double discrepancy_e_k(double X, form_class_group const & G, unsigned k, w_table const & W,
                       sieve_tables const & S, stat_config const & cfg);

bool is_exceptional(std::int64_t q, std::size_t h, stat_config const & cfg);

struct discrepancy_row {
    std::int64_t q;
    std::size_t h;
    int e_max;          // e(C) of the class attaining the row value
    double value;
    bool exceptional;
};

struct discrepancy_report {
    std::string statistic;     // "bv", "bdh" or "ek"
    double Q = 0;
    std::uint64_t X = 0;
    std::optional<unsigned> k;
    double c3 = 0;
    std::vector<discrepancy_row> rows;
    double aggregate = 0;
    double normalized = 0;
};

/* sum_{q in D(Q)} max_C |pi(X;q,C) - li(X)/(e(C)h(q))| */
discrepancy_report bv_statistic(double Q, std::uint64_t X, stat_config const & cfg,
                                sieve_tables const & S);

/* sum_{q in D(Q)} sum_C (pi(X;q,C) - li(X)/(e(C)h(q)))^2 */
discrepancy_report bdh_statistic(double Q, std::uint64_t X, stat_config const & cfg,
                                 sieve_tables const & S);

/* sum_{q in D(Q)} E_k(X;q) */
discrepancy_report ek_statistic(double Q, std::uint64_t X, unsigned k, stat_config const & cfg,
                                sieve_tables const & S);

std::string to_csv(discrepancy_report const & r);
std::string to_json(discrepancy_report const & r);

/* Least nu in [0,1] with #{q in M : q' | q} <= Q^nu for all fundamental 1 < |q'| <= Q. */
double divisor_frequency(std::vector<discriminant> const & M, double Q);

enum class search_status { found, unresolved };

struct least_prime_result {
    search_status status = search_status::unresolved;
    std::uint64_t p = 0;
    std::uint64_t searched_to = 0;
};

/* Smallest prime represented by class C, scanning up to min(cap, S.limit()). */
least_prime_result least_prime(form_class_group const & G, class_index C, sieve_tables const & S,
                               std::uint64_t cap = 100'000'000);

struct x2ny2_result {
    search_status status = search_status::unresolved;
    std::uint64_t n = 0;
    std::uint64_t p = 0;
    std::uint64_t x = 0;
    std::uint64_t y_min = 0;
};

/* Least prime x^2 + n y^2 with x, y >= 1, and the least y among its representations. */
x2ny2_result least_prime_x2ny2(std::uint64_t n, sieve_tables const & S,
                               std::uint64_t cap = 100'000'000);

/*
 * All n <= N whose least prime x^2 + n y^2 needs y >= 2, ascending.
 * Throws search_unresolved when some n has no prime below cap.
 */
std::vector<x2ny2_result> scan_exceptional_x2ny2(std::uint64_t N,
                                                 std::uint64_t cap = 100'000'000);

struct search_unresolved : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/* prod_{2 < p <= P} (1 - (-n/p)/(p - 1)). Throws for non-squarefree n. */
double singular_series(std::uint64_t n, std::uint64_t P);

} // namespace qforms

#endif
