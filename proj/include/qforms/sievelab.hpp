#ifndef QFORMS_SIEVELAB_HPP
#define QFORMS_SIEVELAB_HPP

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "qforms/characters.hpp"

namespace qforms {

/*
 * Every complex class group character (chi^2 != chi_0) of every q in D(Q),
 * with its coefficients lambda_chi(1..N).
 */
struct character_family {
    double Q = 0;
    std::int64_t N = 0;
    struct member {
        std::int64_t q;
        class_character chi;
        std::vector<std::complex<double>> lambda; // index 0 unused
    };
    std::vector<member> members;
};

character_family build_family(double Q, std::int64_t N, unsigned threads = 1);

/* sum_chi |sum_{n<=N} a_n lambda_chi(n)|^2, with a[n-1] = a_n. */
double sieve_lhs(character_family const & F, std::vector<double> const & a);

/* (N (log N)^3 + N^(1/2) (log N) Q^(5/2 + eps)) sum |a_n|^2 */
double sieve_rhs(double Q, std::int64_t N, double eps, std::vector<double> const & a);

enum class coefficient_source { all_ones, rademacher, delta };

struct sieve_experiment_config {
    double Q = 100;
    std::int64_t N = 10'000;
    coefficient_source source = coefficient_source::rademacher;
    std::uint64_t seed = 1;
    std::int64_t n0 = 1;          // position of the delta
    std::uint32_t trials = 100;
    double eps = 0.1;
    bool zero_coefficients = false;
    unsigned threads = 1;
};

struct sieve_experiment {
    sieve_experiment_config config;
    std::size_t family_size = 0;
    std::vector<double> ratios;
    double max_ratio = 0;
};

/* Coefficients of one trial; deterministic in (seed, trial). */
std::vector<double> trial_coefficients(sieve_experiment_config const & cfg, std::uint32_t trial);

sieve_experiment run_sieve_experiment(sieve_experiment_config const & cfg);

std::string to_json(sieve_experiment const & e);

/*
 * Largest ratio measured for the reference preset (seed 1, Q = 100,
 * N = 10^4, 100 Rademacher trials, eps = 0.1). Regressions are flagged
 * beyond 1.5 times this value.
 */
inline constexpr double large_sieve_baseline = 2.942325052343628e-07;

struct hecke_violation {
    std::int64_t q;
    std::size_t chi;     // index into characters(G)
    std::int64_t m, n;
    std::complex<double> lhs, rhs;
};

/*
 * Checks lambda(m) lambda(n) = sum_{d | (m,n)} chi_q(d) lambda(mn/d^2) for
 * all q in D(Q), all characters and all m n <= mn_limit.
 */
std::vector<hecke_violation> hecke_check(double Q, std::int64_t mn_limit, double tolerance = 1e-9,
                                         unsigned threads = 1);

struct convolution_violation {
    std::int64_t q;
    std::size_t chi;     // index into characters(G)
    std::int64_t d1, d2;
    std::int64_t n;      // 0 when no factorization verified
    std::int64_t lambda, convolution;
};

/* For every real character of every q in D(Q): lambda_chi = chi_d1 * chi_d2 on 1..N. */
std::vector<convolution_violation> convolution_check(double Q, std::int64_t N,
                                                     unsigned threads = 1);

} // namespace qforms

#endif
