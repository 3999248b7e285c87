#include "qforms/cache.hpp"

#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qforms/parallel.hpp"

namespace qforms {

namespace {

constexpr char magic[8] = {'Q', 'F', 'C', 'A', 'C', 'H', 'E', '\0'};
constexpr std::uint32_t kind_group = 1;
constexpr std::uint32_t kind_wtable = 2;

class writer
{
  public:
    void u32(std::uint32_t v)
    {
        for (int i = 0; i < 4; ++i)
            buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    void u64(std::uint64_t v)
    {
        for (int i = 0; i < 8; ++i)
            buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
    void raw(char const * p, std::size_t n) { buf_.append(p, n); }
    std::string & str() { return buf_; }

  private:
    std::string buf_;
};

struct truncated : std::runtime_error {
    truncated() : std::runtime_error("truncated") {}
};

class reader
{
  public:
    explicit reader(std::string const & s) : s_(s) {}

    std::uint32_t u32()
    {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= std::uint32_t(static_cast<unsigned char>(s_[pos_ + i])) << (8 * i);
        pos_ += 4;
        return v;
    }
    std::uint64_t u64()
    {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= std::uint64_t(static_cast<unsigned char>(s_[pos_ + i])) << (8 * i);
        pos_ += 8;
        return v;
    }
    std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
    void skip(std::uint64_t n)
    {
        need(n);
        pos_ += n;
    }
    bool bytes_equal(char const * p, std::size_t n)
    {
        need(n);
        bool eq = std::memcmp(s_.data() + pos_, p, n) == 0;
        pos_ += n;
        return eq;
    }
    std::size_t pos() const { return pos_; }
    bool at_end() const { return pos_ == s_.size(); }

  private:
    void need(std::uint64_t n) const
    {
        if (n > s_.size() - pos_)
            throw truncated();
    }
    std::string const & s_;
    std::size_t pos_ = 0;
};

} // namespace

std::filesystem::path cache_file(std::filesystem::path const & dir, std::int64_t q)
{
    return dir / ("q" + std::to_string(q < 0 ? -q : q) + ".qfc");
}

std::string encode_cache(form_class_group const & G, w_table const * W)
{
    writer out;
    out.raw(magic, sizeof magic);
    out.u32(cache_format_version);
    out.u32(W ? 2 : 1);

    writer g;
    g.u64(G.h());
    for (auto const & f : G.classes) {
        g.i64(f.a);
        g.i64(f.b);
        g.i64(f.c);
    }
    for (auto v : G.table)
        g.u32(v);
    out.u32(kind_group);
    out.i64(G.q());
    out.u64(g.str().size());
    out.raw(g.str().data(), g.str().size());

    if (W) {
        writer w;
        w.i64(W->N);
        w.u64(W->h);
        for (auto v : W->w)
            w.u32(v);
        out.u32(kind_wtable);
        out.i64(W->q);
        out.u64(w.str().size());
        out.raw(w.str().data(), w.str().size());
    }
    return std::move(out.str());
}

std::optional<cache_entry> decode_cache(std::string const & bytes, std::int64_t q,
                                        std::string & problem)
{
    problem.clear();
    try {
        reader in(bytes);
        if (!in.bytes_equal(magic, sizeof magic)) {
            problem = "bad magic";
            return std::nullopt;
        }
        std::uint32_t const version = in.u32();
        if (version != cache_format_version) {
            problem = "format version " + std::to_string(version) + ", expected "
                    + std::to_string(cache_format_version);
            return std::nullopt;
        }
        std::uint32_t const count = in.u32();

        std::optional<form_class_group> group;
        std::optional<w_table> table;
        for (std::uint32_t r = 0; r < count; ++r) {
            std::uint32_t const kind = in.u32();
            std::int64_t const rq = in.i64();
            std::uint64_t const length = in.u64();
            std::size_t const start = in.pos();
            if (rq != q) {
                problem = "record for discriminant " + std::to_string(rq);
                return std::nullopt;
            }
            if (kind == kind_group) {
                form_class_group G;
                G.disc = classify_discriminant(q);
                std::uint64_t const h = in.u64();
                if (h == 0 || h > (1u << 20)) {
                    problem = "implausible class number";
                    return std::nullopt;
                }
                for (std::uint64_t i = 0; i < h; ++i) {
                    quad_form f{in.i64(), in.i64(), in.i64()};
                    if (!f.is_reduced() || f.discriminant() != q || !f.is_primitive()) {
                        problem = "stored form is not a reduced form of this discriminant";
                        return std::nullopt;
                    }
                    G.classes.push_back(f);
                }
                G.table.resize(h * h);
                for (auto & v : G.table) {
                    v = in.u32();
                    if (v >= h) {
                        problem = "composition table index out of range";
                        return std::nullopt;
                    }
                }
                G.finalize();
                group = std::move(G);
            } else if (kind == kind_wtable) {
                w_table W;
                W.q = q;
                W.N = in.i64();
                W.h = in.u64();
                if (W.N < 1 || W.h == 0 || length != 16 + 4 * W.h * std::uint64_t(W.N + 1)) {
                    problem = "w-table record has inconsistent size";
                    return std::nullopt;
                }
                W.w.resize(W.h * static_cast<std::size_t>(W.N + 1));
                for (auto & v : W.w)
                    v = in.u32();
                table = std::move(W);
            } else {
                in.skip(length);
            }
            if (in.pos() - start != length) {
                problem = "record length mismatch";
                return std::nullopt;
            }
        }
        if (!in.at_end()) {
            problem = "trailing bytes";
            return std::nullopt;
        }
        if (!group) {
            problem = "no class group record";
            return std::nullopt;
        }
        if (table && table->h != group->h()) {
            problem = "w-table class count differs from class number";
            return std::nullopt;
        }
        return cache_entry{std::move(*group), std::move(table)};
    } catch (truncated const &) {
        problem = "truncated";
    } catch (std::exception const & e) {
        problem = e.what();
    }
    return std::nullopt;
}

std::optional<cache_entry> load_cache(std::filesystem::path const & dir, std::int64_t q,
                                      std::string & problem)
{
    problem.clear();
    auto const path = cache_file(dir, q);
    std::ifstream in(path, std::ios::binary);
    if (!in)
        return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    auto entry = decode_cache(ss.str(), q, problem);
    if (!entry)
        problem = path.string() + ": " + problem;
    return entry;
}

void store_cache(std::filesystem::path const & dir, form_class_group const & G, w_table const * W)
{
    std::filesystem::create_directories(dir);
    auto const path = cache_file(dir, G.q());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot write " + tmp.string());
        auto const bytes = encode_cache(G, W);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out)
            throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

tabulate_summary tabulate(std::filesystem::path const & dir, double Q, std::int64_t N,
                          unsigned threads)
{
    auto const ds = enumerate_df(Q);
    struct outcome {
        bool written = false;
        std::string warning;
    };
    auto results = parallel_map(ds.size(), threads, [&](std::size_t i) {
        outcome o;
        std::string problem;
        auto entry = load_cache(dir, ds[i].q, problem);
        if (entry && entry->table && entry->table->N >= N)
            return o;
        if (!problem.empty())
            o.warning = problem + "; rebuilt";
        auto const G = entry ? std::move(entry->group) : class_group(ds[i].q);
        auto const W = build_w_table(G, N);
        store_cache(dir, G, &W);
        o.written = true;
        return o;
    });
    tabulate_summary s;
    for (auto const & o : results) {
        if (o.written)
            ++s.written;
        else
            ++s.reused;
        if (!o.warning.empty())
            s.warnings.push_back(o.warning);
    }
    return s;
}

form_class_group cached_class_group(std::optional<std::filesystem::path> const & dir, std::int64_t q,
                                    std::vector<std::string> & warnings)
{
    if (dir) {
        std::string problem;
        auto entry = load_cache(*dir, q, problem);
        if (entry)
            return std::move(entry->group);
        if (!problem.empty())
            warnings.push_back(problem + "; recomputed");
    }
    return class_group(q);
}

} // namespace qforms
