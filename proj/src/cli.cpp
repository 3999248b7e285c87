#include "qforms/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "qforms/cache.hpp"
#include "qforms/characters.hpp"
#include "qforms/sievelab.hpp"
#include "qforms/stats.hpp"

namespace qforms::cli {

namespace {

struct usage_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct cap_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string one_line(std::string s)
{
    for (char & ch : s)
        if (ch == '\n' || ch == '\r')
            ch = ' ';
    while (!s.empty() && s.back() == ' ')
        s.pop_back();
    return s;
}

void report_error(std::ostream & err, char const * kind, std::string const & message)
{
    err << "qforms: error kind=" << kind << " message=\"" << one_line(message) << "\"\n";
}

/* All subcommand parameters; validated before work starts. */
struct run_config {
    std::int64_t q = 0;
    double Q = 0;
    std::uint64_t X = 0;
    std::int64_t N = 0;
    int k = -1;
    std::int64_t class_idx = -1;
    std::uint64_t n = 0;
    std::uint64_t max_n = 0;
    std::uint64_t cap = 100'000'000;
    std::uint64_t seed = 1;
    std::uint32_t trials = 1;
    std::string coeffs = "rademacher";
    std::int64_t n0 = 1;
    double eps = 0.1;
    double c3 = 20.0;
    double A = 1.0;
    std::uint32_t grid = 64;
    unsigned threads = 1;
    std::string cache;
    std::string out;
    std::string format = "csv";

    /* check-identities sizes */
    double hecke_Q = 200;
    std::int64_t hecke_limit = 2500;
    double conv_Q = 500;
    std::int64_t conv_N = 10'000;
    double avg_Q = 500;
    std::uint64_t avg_X = 10'000;
    double cnf_Q = 1000;
    double dual_Q = 100;
    std::int64_t dual_N = 1000;

    stat_config stats() const
    {
        stat_config s;
        s.c3 = c3;
        s.A = A;
        s.eps = eps;
        s.y_grid_count = grid;
        s.threads = threads;
        return s;
    }
};

void require(bool cond, std::string const & what)
{
    if (!cond)
        throw usage_failure(what);
}

void within_cap(bool cond, std::string const & what)
{
    if (!cond)
        throw cap_failure(what);
}

void validate_common(run_config const & c)
{
    require(c.threads >= 1, "--threads must be positive");
    within_cap(c.threads <= max_threads, "--threads above 256");
    require(c.c3 > 0, "--c3 must be positive");
    require(c.A > 0, "-A must be positive");
    require(c.eps > 0, "--eps must be positive");
    require(c.grid >= 1, "--grid must be positive");
    require(c.format == "csv" || c.format == "json" || c.format == "text",
            "--format must be csv, json or text");
}

std::optional<std::filesystem::path> cache_dir(run_config const & c)
{
    if (!c.cache.empty())
        return std::filesystem::path(c.cache);
    if (char const * env = std::getenv("QFORMS_CACHE"); env && *env)
        return std::filesystem::path(env);
    return std::nullopt;
}

void emit(run_config const & c, std::string const & text, std::ostream & out)
{
    if (c.out.empty()) {
        out << text;
        return;
    }
    std::ofstream f(c.out, std::ios::binary | std::ios::trunc);
    if (!f)
        throw usage_failure("cannot open --out " + c.out);
    f << text;
}

std::string describe_cyclic(form_class_group const & G)
{
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < G.cyclic.size(); ++i)
        os << (i ? "," : "") << G.cyclic[i].second;
    os << "]";
    return os.str();
}

char const * kind_name(discriminant_kind k)
{
    switch (k) {
    case discriminant_kind::fundamental_in_df:
        return "fundamental_in_df";
    case discriminant_kind::fundamental_excluded_mod8:
        return "fundamental_excluded_mod8";
    case discriminant_kind::not_fundamental:
        return "not_fundamental";
    }
    return "?";
}

int cmd_classgroup(run_config const & c, std::ostream & out, std::ostream & err)
{
    require(c.q < 0, "-q must be a negative fundamental discriminant");
    within_cap(c.q >= -static_cast<std::int64_t>(max_Q), "|q| above 10^6");
    auto const d = classify_discriminant(c.q);
    require(d.is_fundamental(), std::to_string(c.q) + " is not a fundamental discriminant");

    std::vector<std::string> warnings;
    auto const G = cached_class_group(cache_dir(c), c.q, warnings);
    for (auto const & w : warnings)
        err << "qforms: warning " << one_line(w) << "\n";

    std::ostringstream os;
    if (c.format == "json") {
        nlohmann::ordered_json j;
        j["q"] = G.q();
        j["kind"] = kind_name(G.disc.kind);
        j["h"] = G.h();
        nlohmann::ordered_json cyc = nlohmann::ordered_json::array();
        for (auto [g, o] : G.cyclic)
            cyc.push_back({{"generator", g}, {"order", o}});
        j["cyclic"] = cyc;
        nlohmann::ordered_json cls = nlohmann::ordered_json::array();
        for (class_index i = 0; i < G.h(); ++i) {
            auto const & f = G.classes[i];
            cls.push_back({{"index", i},
                           {"form", {f.a, f.b, f.c}},
                           {"order", G.orders[i]},
                           {"e", G.e[i]},
                           {"inverse", G.inverse(i)},
                           {"coords", G.coords[i]}});
        }
        j["classes"] = cls;
        os << j.dump() << "\n";
    } else {
        os << "q=" << G.q() << " h=" << G.h() << " kind=" << kind_name(G.disc.kind)
           << " cyclic=" << describe_cyclic(G) << "\n";
        os << "index,form,order,e,inverse\n";
        for (class_index i = 0; i < G.h(); ++i)
            os << i << "," << G.classes[i] << "," << G.orders[i] << "," << G.e[i] << ","
               << G.inverse(i) << "\n";
    }
    emit(c, os.str(), out);
    return ok;
}

sieve_tables sieve_for(std::uint64_t X)
{
    return build_sieve(std::max<std::uint64_t>(X, 2));
}

int cmd_scan(bool bdh, run_config const & c, std::ostream & out)
{
    require(c.Q >= 1 && c.X >= 1, "-Q and -X must be positive");
    within_cap(c.Q <= max_Q, "-Q above 10^6");
    within_cap(c.X <= max_X, "-X above 10^8");
    require(c.format != "text", "--format must be csv or json");
    auto const cfg = c.stats();
    discrepancy_report r;
    auto const S = sieve_for(c.X);
    if (c.k >= 0) {
        require(!bdh, "-k applies to scan-bv only");
        within_cap(c.X <= 10'000'000, "-X above 10^7 with -k exceeds the w-table budget");
        r = ek_statistic(c.Q, c.X, static_cast<unsigned>(c.k), cfg, S);
    } else {
        r = bdh ? bdh_statistic(c.Q, c.X, cfg, S) : bv_statistic(c.Q, c.X, cfg, S);
    }
    emit(c, c.format == "json" ? to_json(r) : to_csv(r), out);
    return ok;
}

int cmd_least_prime(run_config const & c, std::ostream & out, std::ostream & err)
{
    require(c.q < 0, "-q must be negative");
    within_cap(c.q >= -static_cast<std::int64_t>(max_Q), "|q| above 10^6");
    require(classify_discriminant(c.q).is_fundamental(), "-q must be fundamental");
    require(c.cap >= 2, "--cap must be at least 2");
    within_cap(c.cap <= max_X, "--cap above 10^8");

    std::vector<std::string> warnings;
    auto const G = cached_class_group(cache_dir(c), c.q, warnings);
    for (auto const & w : warnings)
        err << "qforms: warning " << one_line(w) << "\n";
    std::vector<class_index> targets;
    if (c.class_idx >= 0) {
        require(static_cast<std::size_t>(c.class_idx) < G.h(), "--class index out of range");
        targets.push_back(static_cast<class_index>(c.class_idx));
    } else {
        for (class_index i = 0; i < G.h(); ++i)
            targets.push_back(i);
    }

    std::uint64_t limit = std::min<std::uint64_t>(c.cap, std::max<std::uint64_t>(1 << 16, 64 * G.disc.abs_q));
    auto S = sieve_for(limit);
    std::ostringstream os;
    os << "class,form,p,status\n";
    bool unresolved_any = false;
    for (class_index t : targets) {
        auto r = least_prime(G, t, S, c.cap);
        while (r.status == search_status::unresolved && S.limit() < c.cap) {
            S = sieve_for(std::min(c.cap, 4 * S.limit()));
            r = least_prime(G, t, S, c.cap);
        }
        os << t << "," << G.classes[t] << ",";
        if (r.status == search_status::found) {
            os << r.p << ",found\n";
        } else {
            os << ",unresolved\n";
            unresolved_any = true;
        }
    }
    emit(c, os.str(), out);
    if (unresolved_any) {
        report_error(err, "unresolved", "least prime not found below cap " + std::to_string(c.cap));
        return unresolved;
    }
    return ok;
}

int cmd_x2ny2(run_config const & c, std::ostream & out, std::ostream & err)
{
    require((c.max_n > 0) != (c.n > 0), "give exactly one of --max-n or --n");
    require(c.cap >= 2, "--cap must be at least 2");
    within_cap(c.cap <= max_X, "--cap above 10^8");
    within_cap(c.max_n <= 10'000'000 && c.n <= 10'000'000, "n above 10^7");
    require(c.format != "text", "--format must be csv or json");

    std::vector<x2ny2_result> rows;
    if (c.n > 0) {
        std::uint64_t limit = std::min<std::uint64_t>(c.cap, std::max<std::uint64_t>(1 << 16, 64 * c.n));
        auto S = sieve_for(limit);
        auto r = least_prime_x2ny2(c.n, S, c.cap);
        while (r.status == search_status::unresolved && S.limit() < c.cap) {
            S = sieve_for(std::min(c.cap, 4 * S.limit()));
            r = least_prime_x2ny2(c.n, S, c.cap);
        }
        if (r.status == search_status::unresolved) {
            report_error(err, "unresolved", "no prime x^2+" + std::to_string(c.n) + "y^2 below cap");
            return unresolved;
        }
        rows.push_back(r);
    } else {
        try {
            rows = scan_exceptional_x2ny2(c.max_n, c.cap);
        } catch (search_unresolved const & e) {
            report_error(err, "unresolved", e.what());
            return unresolved;
        }
    }

    std::ostringstream os;
    if (c.format == "json") {
        nlohmann::ordered_json j = nlohmann::ordered_json::array();
        for (auto const & r : rows)
            j.push_back({{"n", r.n}, {"p", r.p}, {"x", r.x}, {"y_min", r.y_min}});
        os << j.dump() << "\n";
    } else {
        os << "n,p,x,y_min\n";
        for (auto const & r : rows)
            os << r.n << "," << r.p << "," << r.x << "," << r.y_min << "\n";
    }
    emit(c, os.str(), out);
    return ok;
}

int cmd_sieve_ratio(run_config const & c, std::ostream & out)
{
    require(c.Q >= 1 && c.N >= 3 && c.trials >= 1, "-Q, -N >= 3 and --trials must be positive");
    within_cap(c.Q <= 10'000, "-Q above 10^4");
    within_cap(c.N <= max_N, "-N above 10^7");
    within_cap(c.trials <= 1'000'000, "--trials above 10^6");
    sieve_experiment_config cfg;
    cfg.Q = c.Q;
    cfg.N = c.N;
    cfg.seed = c.seed;
    cfg.trials = c.trials;
    cfg.eps = c.eps;
    cfg.n0 = c.n0;
    cfg.threads = c.threads;
    if (c.coeffs == "ones")
        cfg.source = coefficient_source::all_ones;
    else if (c.coeffs == "rademacher")
        cfg.source = coefficient_source::rademacher;
    else if (c.coeffs == "delta")
        cfg.source = coefficient_source::delta;
    else if (c.coeffs == "zero")
        cfg.zero_coefficients = true;
    else
        throw usage_failure("--coeffs must be ones, rademacher, delta or zero");
    if (cfg.source == coefficient_source::delta)
        require(c.n0 >= 1 && c.n0 <= c.N, "--n0 must be in 1..N");
    emit(c, to_json(run_sieve_experiment(cfg)), out);
    return ok;
}

int cmd_check_identities(run_config const & c, std::ostream & out, std::ostream & err)
{
    within_cap(c.hecke_Q <= 10'000 && c.conv_Q <= 10'000 && c.avg_Q <= 10'000 && c.cnf_Q <= max_Q
                && c.dual_Q <= 10'000,
            "check sizes exceed caps");
    require(c.hecke_limit >= 1, "--hecke-limit must be positive");
    within_cap(c.hecke_limit <= 100'000, "--hecke-limit above 10^5");
    require(c.conv_N >= 1, "--conv-N must be positive");
    within_cap(c.conv_N <= 1'000'000, "--conv-N above 10^6");
    require(c.avg_X >= 1, "--avg-X must be positive");
    within_cap(c.avg_X <= max_X, "--avg-X above 10^8");
    require(c.dual_N >= 1, "--dual-N must be positive");
    within_cap(c.dual_N <= 100'000, "--dual-N above 10^5");

    std::ostringstream os;
    std::size_t failures = 0;
    auto line = [&](std::string const & name, std::size_t violations) {
        os << name << ": " << (violations ? "FAIL" : "PASS") << " violations=" << violations << "\n";
        failures += violations;
    };

    std::size_t cnf = 0;
    for (auto const & d : enumerate_df(c.cnf_Q))
        if (class_number_formula(d.q) != static_cast<std::int64_t>(class_group(d.q).h()))
            ++cnf;
    line("class_number_formula", cnf);

    {
        auto const S = sieve_for(c.avg_X);
        std::size_t bad = 0;
        for (auto const & d : enumerate_df(c.avg_Q))
            if (!check_average_identity(class_group(d.q), S, c.avg_X).holds())
                ++bad;
        line("average_identity", bad);
    }

    std::size_t dual = 0;
    for (auto const & d : enumerate_df(c.dual_Q)) {
        auto const G = class_group(d.q);
        if (build_w_table(G, c.dual_N, w_mode::lattice)
            != build_w_table(G, c.dual_N, w_mode::multiplicative))
            ++dual;
    }
    line("dual_w_tables", dual);

    line("hecke_relation", hecke_check(c.hecke_Q, c.hecke_limit, 1e-9, c.threads).size());
    line("kronecker_factorization", convolution_check(c.conv_Q, c.conv_N, c.threads).size());

    emit(c, os.str(), out);
    if (failures) {
        report_error(err, "identity", std::to_string(failures) + " identity violations");
        return identity_violation;
    }
    return ok;
}

int cmd_tabulate(run_config const & c, std::ostream & out, std::ostream & err)
{
    auto dir = cache_dir(c);
    require(dir.has_value(), "--cache or QFORMS_CACHE is required");
    require(c.Q >= 1 && c.N >= 1, "-Q and -N must be positive");
    within_cap(c.Q <= max_Q, "-Q above 10^6");
    within_cap(c.N <= 1'000'000, "-N above 10^6");
    auto const s = tabulate(*dir, c.Q, c.N, c.threads);
    for (auto const & w : s.warnings)
        err << "qforms: warning " << one_line(w) << "\n";
    std::ostringstream os;
    os << "written=" << s.written << " reused=" << s.reused << " warnings=" << s.warnings.size()
       << "\n";
    emit(c, os.str(), out);
    return ok;
}

} // namespace

int run(std::vector<std::string> const & args, std::ostream & out, std::ostream & err)
{
    run_config c;
    CLI::App app{"Binary quadratic forms, class group characters and prime statistics", "qforms"};
    app.require_subcommand(1);

    auto add_common = [&](CLI::App * sub) {
        sub->add_option("--threads", c.threads, "worker threads");
        sub->add_option("--out", c.out, "write the report to this file instead of stdout");
        sub->add_option("--cache", c.cache, "cache directory (default $QFORMS_CACHE)");
    };

    auto * classgroup = app.add_subcommand("classgroup", "class group of one discriminant");
    classgroup->add_option("-q", c.q, "negative fundamental discriminant")->required();
    classgroup->add_option("--format", c.format, "text or json")->default_str("text");
    add_common(classgroup);

    auto add_scan = [&](CLI::App * sub) {
        sub->add_option("-Q", c.Q, "discriminant bound |q| <= Q")->required();
        sub->add_option("-X", c.X, "prime bound")->required();
        sub->add_option("--c3", c.c3, "exceptional-discriminant constant");
        sub->add_option("-A", c.A, "log power in the normalization");
        sub->add_option("--grid", c.grid, "Y grid points for -k");
        sub->add_option("--format", c.format, "csv or json");
        add_common(sub);
    };
    auto * scan_bv = app.add_subcommand("scan-bv", "sum over q of max_C |pi(X;q,C) - li(X)/(e(C)h)|");
    add_scan(scan_bv);
    scan_bv->add_option("-k", c.k, "report sum of E_k(X;q) for this k instead");
    auto * scan_bdh = app.add_subcommand("scan-bdh", "sum over q and C of squared deviations");
    add_scan(scan_bdh);

    auto * lp = app.add_subcommand("least-prime", "least prime represented by each class");
    lp->add_option("-q", c.q, "negative fundamental discriminant")->required();
    lp->add_option("--class", c.class_idx, "class index (default: all)");
    lp->add_option("--cap", c.cap, "search cap");
    add_common(lp);

    auto * x2 = app.add_subcommand("x2ny2", "least primes x^2 + n y^2 with x, y >= 1");
    x2->add_option("--max-n", c.max_n, "list all n <= max-n with y_min >= 2");
    x2->add_option("--n", c.n, "report the least prime for a single n");
    x2->add_option("--cap", c.cap, "search cap");
    x2->add_option("--format", c.format, "csv or json");
    add_common(x2);

    auto * sr = app.add_subcommand("sieve-ratio", "large sieve ratio experiment");
    sr->add_option("-Q", c.Q, "discriminant bound")->required();
    sr->add_option("-N", c.N, "coefficient length")->required();
    sr->add_option("--trials", c.trials, "number of trials");
    sr->add_option("--seed", c.seed, "generator seed");
    sr->add_option("--coeffs", c.coeffs, "ones, rademacher, delta or zero");
    sr->add_option("--n0", c.n0, "delta position");
    sr->add_option("--eps", c.eps, "exponent slack");
    add_common(sr);

    auto * ci = app.add_subcommand("check-identities", "verify the exact identities");
    ci->add_option("--hecke-Q", c.hecke_Q);
    ci->add_option("--hecke-limit", c.hecke_limit);
    ci->add_option("--conv-Q", c.conv_Q);
    ci->add_option("--conv-N", c.conv_N);
    ci->add_option("--avg-Q", c.avg_Q);
    ci->add_option("--avg-X", c.avg_X);
    ci->add_option("--cnf-Q", c.cnf_Q);
    ci->add_option("--dual-Q", c.dual_Q);
    ci->add_option("--dual-N", c.dual_N);
    add_common(ci);

    auto * tab = app.add_subcommand("tabulate", "write class groups and w-tables to the cache");
    tab->add_option("-Q", c.Q, "discriminant bound")->required();
    tab->add_option("-N", c.N, "w-table length");
    add_common(tab);

    std::vector<std::string> argv_store{"qforms"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char *> argv;
    for (auto & s : argv_store)
        argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (CLI::CallForHelp const &) {
        out << app.help();
        return ok;
    } catch (CLI::CallForAllHelp const &) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (CLI::ParseError const & e) {
        report_error(err, "usage", e.what());
        return usage_error;
    }

    try {
        if (*classgroup) {
            if (c.format == "csv")
                c.format = "text";
            validate_common(c);
            return cmd_classgroup(c, out, err);
        }
        validate_common(c);
        if (*scan_bv)
            return cmd_scan(false, c, out);
        if (*scan_bdh)
            return cmd_scan(true, c, out);
        if (*lp)
            return cmd_least_prime(c, out, err);
        if (*x2)
            return cmd_x2ny2(c, out, err);
        if (*sr)
            return cmd_sieve_ratio(c, out);
        if (*ci)
            return cmd_check_identities(c, out, err);
        if (*tab) {
            if (c.N == 0)
                c.N = 1000;
            return cmd_tabulate(c, out, err);
        }
    } catch (usage_failure const & e) {
        report_error(err, "usage", e.what());
        return usage_error;
    } catch (cap_failure const & e) {
        report_error(err, "cap", e.what());
        return unresolved;
    } catch (std::invalid_argument const & e) {
        report_error(err, "usage", e.what());
        return usage_error;
    } catch (std::logic_error const & e) {
        report_error(err, "identity", e.what());
        return identity_violation;
    } catch (std::exception const & e) {
        report_error(err, "runtime", e.what());
        return usage_error;
    }
    report_error(err, "usage", "no subcommand");
    return usage_error;
}

} // namespace qforms::cli
