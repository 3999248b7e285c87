#include "qforms/sievelab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "qforms/parallel.hpp"

namespace qforms {

character_family build_family(double Q, std::int64_t N, unsigned threads)
{
    if (N < 1)
        throw std::invalid_argument("build_family: N must be positive");
    character_family F;
    F.Q = Q;
    F.N = N;
    auto const ds = enumerate_df(Q);
    auto per_q = parallel_map(ds.size(), threads, [&](std::size_t i) {
        std::vector<character_family::member> out;
        auto const G = class_group(ds[i].q);
        auto const chis = complex_characters(G);
        if (chis.empty())
            return out;
        auto const W = build_w_table(G, N);
        for (auto const & chi : chis)
            out.push_back({G.q(), chi, lambda_series(chi, G, W)});
        return out;
    });
    for (auto & v : per_q)
        for (auto & m : v)
            F.members.push_back(std::move(m));
    return F;
}

double sieve_lhs(character_family const & F, std::vector<double> const & a)
{
    if (static_cast<std::int64_t>(a.size()) > F.N)
        throw std::invalid_argument("sieve_lhs: more coefficients than tabulated lambda values");
    compensated_sum total;
    for (auto const & m : F.members) {
        std::complex<double> s = 0;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i] != 0)
                s += a[i] * m.lambda[i + 1];
        total.add(std::norm(s));
    }
    return total.value();
}

double sieve_rhs(double Q, std::int64_t N, double eps, std::vector<double> const & a)
{
    double const n = static_cast<double>(N);
    double const logn = std::log(n);
    double energy = 0;
    for (double x : a)
        energy += x * x;
    return (n * logn * logn * logn + std::sqrt(n) * logn * std::pow(Q, 2.5 + eps)) * energy;
}

std::vector<double> trial_coefficients(sieve_experiment_config const & cfg, std::uint32_t trial)
{
    std::vector<double> a(static_cast<std::size_t>(cfg.N), 0.0);
    if (cfg.zero_coefficients)
        return a;
    switch (cfg.source) {
    case coefficient_source::all_ones:
        std::fill(a.begin(), a.end(), 1.0);
        break;
    case coefficient_source::delta:
        if (cfg.n0 < 1 || cfg.n0 > cfg.N)
            throw std::invalid_argument("delta position outside 1..N");
        a[cfg.n0 - 1] = 1.0;
        break;
    case coefficient_source::rademacher: {
        std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed),
                          static_cast<std::uint32_t>(cfg.seed >> 32), trial};
        std::mt19937_64 gen(seq);
        for (auto & x : a)
            x = (gen() >> 63) ? 1.0 : -1.0;
        break;
    }
    }
    return a;
}

sieve_experiment run_sieve_experiment(sieve_experiment_config const & cfg)
{
    if (cfg.trials < 1)
        throw std::invalid_argument("run_sieve_experiment: trials must be at least 1");
    if (cfg.N < 3)
        throw std::invalid_argument("run_sieve_experiment: N must be at least 3");
    auto const F = build_family(cfg.Q, cfg.N, cfg.threads);

    sieve_experiment e;
    e.config = cfg;
    e.family_size = F.members.size();
    e.ratios = parallel_map(cfg.trials, cfg.threads, [&](std::size_t t) {
        auto const a = trial_coefficients(cfg, static_cast<std::uint32_t>(t));
        double const rhs = sieve_rhs(cfg.Q, cfg.N, cfg.eps, a);
        if (rhs == 0)
            return 0.0;
        return sieve_lhs(F, a) / rhs;
    });
    for (double r : e.ratios)
        e.max_ratio = std::max(e.max_ratio, r);
    return e;
}

namespace {

std::string fmt17(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

char const * source_name(coefficient_source s)
{
    switch (s) {
    case coefficient_source::all_ones:
        return "ones";
    case coefficient_source::rademacher:
        return "rademacher";
    case coefficient_source::delta:
        return "delta";
    }
    return "?";
}

} // namespace

std::string to_json(sieve_experiment const & e)
{
    auto const & c = e.config;
    std::ostringstream os;
    os << "{\"meta\":{\"Q\":" << fmt17(c.Q) << ",\"N\":" << c.N << ",\"coefficients\":\""
       << (c.zero_coefficients ? "zero" : source_name(c.source)) << "\",\"seed\":" << c.seed
       << ",\"n0\":" << c.n0 << ",\"trials\":" << c.trials << ",\"eps\":" << fmt17(c.eps)
       << ",\"family_size\":" << e.family_size << "},\"ratios\":[";
    for (std::size_t i = 0; i < e.ratios.size(); ++i)
        os << (i ? "," : "") << fmt17(e.ratios[i]);
    os << "],\"max_ratio\":" << fmt17(e.max_ratio) << "}\n";
    return os.str();
}

std::vector<hecke_violation> hecke_check(double Q, std::int64_t mn_limit, double tolerance,
                                         unsigned threads)
{
    auto const ds = enumerate_df(Q);
    auto per_q = parallel_map(ds.size(), threads, [&](std::size_t i) {
        std::vector<hecke_violation> out;
        auto const G = class_group(ds[i].q);
        auto const W = build_w_table(G, mn_limit);
        std::vector<int> chi_q(static_cast<std::size_t>(mn_limit) + 1);
        for (std::int64_t d = 1; d <= mn_limit; ++d)
            chi_q[d] = kronecker(G.q(), d);
        auto const chis = characters(G);
        for (std::size_t ci = 0; ci < chis.size(); ++ci) {
            auto const lam = lambda_series(chis[ci], G, W);
            for (std::int64_t m = 1; m <= mn_limit; ++m) {
                for (std::int64_t n = 1; m * n <= mn_limit; ++n) {
                    std::complex<double> const lhs = lam[m] * lam[n];
                    std::complex<double> rhs = 0;
                    std::int64_t const g = std::gcd(m, n);
                    for (std::int64_t d = 1; d <= g; ++d)
                        if (g % d == 0 && chi_q[d] != 0)
                            rhs += static_cast<double>(chi_q[d]) * lam[m * n / (d * d)];
                    if (std::abs(lhs - rhs) > tolerance)
                        out.push_back({G.q(), ci, m, n, lhs, rhs});
                }
            }
        }
        return out;
    });
    std::vector<hecke_violation> all;
    for (auto & v : per_q)
        all.insert(all.end(), v.begin(), v.end());
    return all;
}

std::vector<convolution_violation> convolution_check(double Q, std::int64_t N, unsigned threads)
{
    auto const ds = enumerate_df(Q);
    auto per_q = parallel_map(ds.size(), threads, [&](std::size_t i) {
        std::vector<convolution_violation> out;
        auto const G = class_group(ds[i].q);
        auto const W = build_w_table(G, N);
        auto const chis = characters(G);
        for (std::size_t ci = 0; ci < chis.size(); ++ci) {
            auto const & chi = chis[ci];
            if (!chi.is_real)
                continue;
            std::pair<std::int64_t, std::int64_t> f;
            try {
                f = kronecker_factorize(chi, G, W);
            } catch (std::logic_error const &) {
                out.push_back({G.q(), ci, 0, 0, 0, 0, 0});
                continue;
            }
            /* independent recheck through the divisor-sum form */
            for (std::int64_t n = 1; n <= N; ++n) {
                std::int64_t const lam = lambda_real(chi, G, W, n);
                std::int64_t const conv = kronecker_convolution(f.first, f.second, n);
                if (lam != conv)
                    out.push_back({G.q(), ci, f.first, f.second, n, lam, conv});
            }
        }
        return out;
    });
    std::vector<convolution_violation> all;
    for (auto & v : per_q)
        all.insert(all.end(), v.begin(), v.end());
    return all;
}

} // namespace qforms
