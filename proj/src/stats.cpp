#include "qforms/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "qforms/parallel.hpp"

namespace qforms {

void stat_config::validate() const
{
    if (!(c3 > 0))
        throw std::invalid_argument("c3 must be positive");
    if (y_grid_count < 1)
        throw std::invalid_argument("y_grid_count must be at least 1");
    if (!(li_tolerance > 0))
        throw std::invalid_argument("li tolerance must be positive");
    if (!(A > 0) || !(eps > 0))
        throw std::invalid_argument("A and eps must be positive");
}

namespace {

double simpson_step(double (*g)(double), double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth)
{
    double const m = 0.5 * (a + b);
    double const lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double const flm = g(lm), frm = g(rm);
    double const left = (m - a) / 6 * (fa + 4 * flm + fm);
    double const right = (b - m) / 6 * (fm + 4 * frm + fb);
    double const delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15 * tol)
        return left + right + delta / 15;
    return simpson_step(g, a, m, fa, flm, fm, left, tol / 2, depth - 1)
         + simpson_step(g, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

/* dt / log t with t = e^u */
double li_integrand(double u)
{
    return std::exp(u) / u;
}

} // namespace

double li(double X, double tolerance)
{
    if (!(X >= 2))
        throw std::invalid_argument("li: X must be at least 2");
    if (X == 2)
        return 0.0;
    double const a = std::log(2.0), b = std::log(X);
    double const fa = li_integrand(a), fb = li_integrand(b), fm = li_integrand(0.5 * (a + b));
    double const whole = (b - a) / 6 * (fa + 4 * fm + fb);
    /* tolerance is relative to the magnitude of the integral */
    double const scale = std::max(1.0, X / b);
    return simpson_step(li_integrand, a, b, fa, fm, fb, whole, tolerance * scale, 60);
}

std::vector<std::uint64_t> prime_class_counts(form_class_group const & G, sieve_tables const & S,
                                              std::uint64_t X)
{
    std::vector<std::uint64_t> counts(G.h(), 0);
    if (X < 2)
        return counts;
    S.for_each_prime(2, X, [&](std::uint64_t p) {
        for (class_index c : prime_classes(G, p))
            ++counts[c];
    });
    return counts;
}

std::uint64_t pi_repr(sieve_tables const & S, std::uint64_t X, form_class_group const & G,
                      class_index C)
{
    return prime_class_counts(G, S, X).at(C);
}

average_identity check_average_identity(form_class_group const & G, sieve_tables const & S,
                                        std::uint64_t X)
{
    auto const counts = prime_class_counts(G, S, X);
    average_identity r{0, 0};
    for (class_index c = 0; c < G.h(); ++c)
        r.weighted_count += G.e[c] * static_cast<std::int64_t>(counts[c]);
    if (X >= 2) {
        S.for_each_prime(2, X, [&](std::uint64_t p) {
            auto const pp = static_cast<std::int64_t>(p);
            if (G.disc.abs_q % pp == 0)
                --r.weighted_count;
            r.kronecker_sum += 1 + kronecker(G.q(), pp);
        });
    }
    return r;
}

std::vector<prime_power> prime_powers(sieve_tables const & S, std::uint64_t N)
{
    std::vector<prime_power> out;
    for (std::uint64_t p : S.primes_up_to(N)) {
        double const lp = std::log(static_cast<double>(p));
        for (std::uint64_t n = p; n <= N; n *= p) {
            out.push_back({n, lp});
            if (n > N / p)
                break;
        }
    }
    std::sort(out.begin(), out.end(), [](auto const & x, auto const & y) { return x.n < y.n; });
    return out;
}

namespace {

double factorial(unsigned k)
{
    double f = 1;
    for (unsigned i = 2; i <= k; ++i)
        f *= i;
    return f;
}

void check_table_range(double Y, w_table const & W)
{
    if (Y > static_cast<double>(W.N))
        throw std::out_of_range("psi_k: Y beyond the w-table limit");
}

} // namespace

double psi_k(double Y, form_class_group const &, class_index C, unsigned k, w_table const & W,
             sieve_tables const & S)
{
    check_table_range(Y, W);
    if (Y < 2)
        return 0.0;
    auto const top = static_cast<std::uint64_t>(std::floor(Y));
    double const logY = std::log(Y);
    double s = 0;
    for (auto const & pp : prime_powers(S, top)) {
        std::uint32_t w = W(C, static_cast<std::int64_t>(pp.n));
        if (w)
            s += pp.log_p * std::pow(logY - std::log(static_cast<double>(pp.n)), k) * w;
    }
    return s / factorial(k);
}

std::complex<double> psi_k_chi(double Y, class_character const & chi, form_class_group const & G,
                               unsigned k, w_table const & W, sieve_tables const & S)
{
    check_table_range(Y, W);
    if (Y < 2)
        return 0.0;
    auto const top = static_cast<std::uint64_t>(std::floor(Y));
    double const logY = std::log(Y);
    std::complex<double> s = 0;
    for (auto const & pp : prime_powers(S, top)) {
        auto const n = static_cast<std::int64_t>(pp.n);
        s += pp.log_p * std::pow(logY - std::log(static_cast<double>(pp.n)), k)
           * lambda_chi(chi, G, W, n);
    }
    return s / factorial(k);
}

namespace {

struct e_k_detail {
    double value = 0;
    class_index cls = 0;
};

e_k_detail e_k_with_class(double X, form_class_group const & G, unsigned k, w_table const & W,
                          sieve_tables const & S, stat_config const & cfg)
{
    check_table_range(X, W);
    std::size_t const h = G.h();
    e_k_detail out{0.0, G.principal};
    if (h == 1 || X < 2)
        return out;

    auto const top = static_cast<std::uint64_t>(std::floor(X));
    auto const pps = prime_powers(S, top);

    std::vector<double> grid;
    for (std::uint32_t j = 1; j <= cfg.y_grid_count; ++j)
        grid.push_back(X * j / cfg.y_grid_count);

    std::vector<double> psi(h);
    auto update = [&] {
        double total = 0;
        for (double v : psi)
            total += v;
        double const mean = total / static_cast<double>(h);
        for (class_index c = 0; c < h; ++c) {
            double const dev = std::abs(psi[c] - mean);
            if (dev > out.value) {
                out.value = dev;
                out.cls = c;
            }
        }
    };

    if (k == 0) {
        /* step function: evaluate at every jump and every grid point */
        std::vector<double> points = grid;
        for (auto const & pp : pps)
            points.push_back(static_cast<double>(pp.n));
        std::sort(points.begin(), points.end());
        std::fill(psi.begin(), psi.end(), 0.0);
        std::size_t next = 0;
        for (double Y : points) {
            while (next < pps.size() && static_cast<double>(pps[next].n) <= Y) {
                auto const n = static_cast<std::int64_t>(pps[next].n);
                for (class_index c = 0; c < h; ++c)
                    if (std::uint32_t w = W(c, n))
                        psi[c] += pps[next].log_p * w;
                ++next;
            }
            update();
        }
        return out;
    }

    double const kf = factorial(k);
    for (double Y : grid) {
        if (Y < 2)
            continue;
        double const logY = std::log(Y);
        std::fill(psi.begin(), psi.end(), 0.0);
        for (auto const & pp : pps) {
            if (static_cast<double>(pp.n) > Y)
                break;
            double const t = pp.log_p * std::pow(logY - std::log(static_cast<double>(pp.n)), k) / kf;
            auto const n = static_cast<std::int64_t>(pp.n);
            for (class_index c = 0; c < h; ++c)
                if (std::uint32_t w = W(c, n))
                    psi[c] += t * w;
        }
        update();
    }
    return out;
}

} // namespace

double discrepancy_e_k(double X, form_class_group const & G, unsigned k, w_table const & W,
                       sieve_tables const & S, stat_config const & cfg)
{
    return e_k_with_class(X, G, k, W, S, cfg).value;
}

bool is_exceptional(std::int64_t q, std::size_t h, stat_config const & cfg)
{
    double const a = static_cast<double>(q < 0 ? -q : q);
    return std::sqrt(a) / std::log(a) > cfg.c3 * static_cast<double>(h);
}

namespace {

enum class pi_stat { bv, bdh };

discrepancy_report pi_statistic(pi_stat kind, double Q, std::uint64_t X, stat_config const & cfg,
                                sieve_tables const & S)
{
    cfg.validate();
    if (X > S.limit())
        throw std::out_of_range("X beyond sieve limit");
    discrepancy_report r;
    r.statistic = kind == pi_stat::bv ? "bv" : "bdh";
    r.Q = Q;
    r.X = X;
    r.c3 = cfg.c3;

    auto const ds = enumerate_df(Q);
    double const lix = X >= 2 ? li(static_cast<double>(X), cfg.li_tolerance) : 0.0;
    r.rows = parallel_map(ds.size(), cfg.threads, [&](std::size_t i) {
        auto const G = class_group(ds[i].q);
        auto const counts = prime_class_counts(G, S, X);
        double const h = static_cast<double>(G.h());
        discrepancy_row row{ds[i].q, G.h(), 0, 0.0, is_exceptional(ds[i].q, G.h(), cfg)};
        compensated_sum sq;
        double best = -1;
        for (class_index c = 0; c < G.h(); ++c) {
            double const dev = static_cast<double>(counts[c]) - lix / (G.e[c] * h);
            double const term = kind == pi_stat::bv ? std::abs(dev) : dev * dev;
            sq.add(term);
            if (term > best) {
                best = term;
                row.e_max = G.e[c];
            }
        }
        row.value = kind == pi_stat::bv ? best : sq.value();
        return row;
    });

    compensated_sum total;
    for (auto const & row : r.rows)
        total.add(row.value);
    r.aggregate = total.value();
    double const logx = X >= 2 ? std::log(static_cast<double>(X)) : 0.0;
    double const xpow = kind == pi_stat::bv ? static_cast<double>(X)
                                            : static_cast<double>(X) * static_cast<double>(X);
    double const denom = std::sqrt(Q) * xpow * std::pow(logx, -cfg.A);
    r.normalized = denom > 0 && std::isfinite(denom) ? r.aggregate / denom : 0.0;
    return r;
}

} // namespace

discrepancy_report bv_statistic(double Q, std::uint64_t X, stat_config const & cfg,
                                sieve_tables const & S)
{
    return pi_statistic(pi_stat::bv, Q, X, cfg, S);
}

discrepancy_report bdh_statistic(double Q, std::uint64_t X, stat_config const & cfg,
                                 sieve_tables const & S)
{
    return pi_statistic(pi_stat::bdh, Q, X, cfg, S);
}

discrepancy_report ek_statistic(double Q, std::uint64_t X, unsigned k, stat_config const & cfg,
                                sieve_tables const & S)
{
    cfg.validate();
    if (X > S.limit())
        throw std::out_of_range("X beyond sieve limit");
    discrepancy_report r;
    r.statistic = "ek";
    r.Q = Q;
    r.X = X;
    r.k = k;
    r.c3 = cfg.c3;

    auto const ds = enumerate_df(Q);
    r.rows = parallel_map(ds.size(), cfg.threads, [&](std::size_t i) {
        auto const G = class_group(ds[i].q);
        discrepancy_row row{ds[i].q, G.h(), 0, 0.0, is_exceptional(ds[i].q, G.h(), cfg)};
        row.e_max = G.e[G.principal];
        if (X >= 1) {
            auto const W = build_w_table(G, static_cast<std::int64_t>(X));
            auto const d = e_k_with_class(static_cast<double>(X), G, k, W, S, cfg);
            row.value = d.value;
            row.e_max = G.e[d.cls];
        }
        return row;
    });

    compensated_sum total;
    for (auto const & row : r.rows)
        total.add(row.value);
    r.aggregate = total.value();
    double const logx = X >= 2 ? std::log(static_cast<double>(X)) : 0.0;
    double const denom = std::sqrt(Q) * static_cast<double>(X) * std::pow(logx, -cfg.A);
    r.normalized = denom > 0 && std::isfinite(denom) ? r.aggregate / denom : 0.0;
    return r;
}

namespace {

std::string fmt17(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string to_csv(discrepancy_report const & r)
{
    std::ostringstream os;
    os << "q,h,e_max,value,exceptional\n";
    for (auto const & row : r.rows)
        os << row.q << ',' << row.h << ',' << row.e_max << ',' << fmt17(row.value) << ','
           << (row.exceptional ? 1 : 0) << '\n';
    return os.str();
}

std::string to_json(discrepancy_report const & r)
{
    std::ostringstream os;
    os << "{\"meta\":{\"statistic\":\"" << r.statistic << "\",\"Q\":" << fmt17(r.Q)
       << ",\"X\":" << r.X << ",\"k\":";
    if (r.k)
        os << *r.k;
    else
        os << "null";
    os << ",\"c3\":" << fmt17(r.c3) << "},\"rows\":[";
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        auto const & row = r.rows[i];
        if (i)
            os << ',';
        os << "{\"q\":" << row.q << ",\"h\":" << row.h << ",\"e_max\":" << row.e_max
           << ",\"value\":" << fmt17(row.value)
           << ",\"exceptional\":" << (row.exceptional ? "true" : "false") << '}';
    }
    os << "],\"aggregate\":" << fmt17(r.aggregate) << ",\"normalized\":" << fmt17(r.normalized)
       << "}\n";
    return os.str();
}

double divisor_frequency(std::vector<discriminant> const & M, double Q)
{
    std::map<std::int64_t, std::uint64_t> counts;
    for (auto const & d : M) {
        if (static_cast<double>(d.abs_q) > Q)
            throw std::invalid_argument("divisor_frequency: |q| exceeds Q");
        for (std::int64_t k = 2; k <= d.abs_q; ++k)
            if (d.abs_q % k == 0 && (is_fundamental(k) || is_fundamental(-k)))
                ++counts[k];
    }
    std::uint64_t most = 0;
    for (auto const & [k, c] : counts)
        most = std::max(most, c);
    if (most <= 1 || Q <= 1)
        return 0.0;
    return std::min(1.0, std::log(static_cast<double>(most)) / std::log(Q));
}

least_prime_result least_prime(form_class_group const & G, class_index C, sieve_tables const & S,
                               std::uint64_t cap)
{
    least_prime_result r;
    std::uint64_t const top = std::min(cap, S.limit());
    r.searched_to = top;
    for (std::uint64_t p = 2; p <= top; p = p == 2 ? 3 : p + 2) {
        if (!S.is_prime(p))
            continue;
        auto const cs = prime_classes(G, p);
        if (std::find(cs.begin(), cs.end(), C) == cs.end())
            continue;
        if (representation_count(G.classes[C], static_cast<std::int64_t>(p)) == 0)
            throw std::logic_error("least_prime: prime class disagrees with representation count");
        r.status = search_status::found;
        r.p = p;
        return r;
    }
    return r;
}

x2ny2_result least_prime_x2ny2(std::uint64_t n, sieve_tables const & S, std::uint64_t cap)
{
    if (n < 1)
        throw std::invalid_argument("least_prime_x2ny2: n must be positive");
    x2ny2_result r;
    r.n = n;
    std::uint64_t const top = std::min(cap, S.limit());
    for (std::uint64_t p = n + 1; p <= top; ++p) {
        if (!S.is_prime(p))
            continue;
        for (std::uint64_t y = 1; n * y * y < p; ++y) {
            std::int64_t x;
            if (is_square(static_cast<std::int64_t>(p - n * y * y), &x) && x >= 1) {
                r.status = search_status::found;
                r.p = p;
                r.x = static_cast<std::uint64_t>(x);
                r.y_min = y;
                return r;
            }
        }
    }
    return r;
}

std::vector<x2ny2_result> scan_exceptional_x2ny2(std::uint64_t N, std::uint64_t cap)
{
    std::vector<x2ny2_result> out;
    if (N < 1)
        return out;
    std::uint64_t limit = std::min<std::uint64_t>(cap, std::max<std::uint64_t>(1 << 16, 64 * N));
    auto S = build_sieve(std::max<std::uint64_t>(limit, 2));
    for (std::uint64_t n = 1; n <= N; ++n) {
        auto r = least_prime_x2ny2(n, S, cap);
        while (r.status == search_status::unresolved && S.limit() < cap) {
            limit = std::min(cap, 4 * S.limit());
            S = build_sieve(limit);
            r = least_prime_x2ny2(n, S, cap);
        }
        if (r.status == search_status::unresolved)
            throw search_unresolved("no prime x^2+" + std::to_string(n) + "y^2 below "
                                    + std::to_string(cap));
        if (r.y_min >= 2)
            out.push_back(r);
    }
    return out;
}

double singular_series(std::uint64_t n, std::uint64_t P)
{
    if (n < 1 || !is_squarefree(static_cast<std::int64_t>(n)))
        throw std::invalid_argument("singular_series: n must be squarefree and positive");
    if (P < 3)
        return 1.0;
    auto const S = build_sieve(P);
    double prod = 1.0;
    S.for_each_prime(3, P, [&](std::uint64_t p) {
        int const j = kronecker(-static_cast<std::int64_t>(n), static_cast<std::int64_t>(p));
        prod *= 1.0 - static_cast<double>(j) / static_cast<double>(p - 1);
    });
    return prod;
}

} // namespace qforms
