#ifndef QFORMS_CACHE_HPP
#define QFORMS_CACHE_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qforms/characters.hpp"
#include "qforms/forms.hpp"

namespace qforms {

/*
 * On-disk layout, all integers little-endian:
 *
 *   magic   8 bytes  "QFCACHE\0"
 *   version u32
 *   count   u32      number of records
 *   records { kind u32, q i64, length u64, payload[length] }
 *
 * kind 1: class group  { h u64, h x (a, b, c) i64, h*h x u32 composition }
 * kind 2: w-table      { N i64, h u64, h*(N+1) x u32 }
 *
 * One file per discriminant, named q<|q|>.qfc inside the cache directory.
 */
inline constexpr std::uint32_t cache_format_version = 1;

struct cache_entry {
    form_class_group group;
    std::optional<w_table> table;
};

std::filesystem::path cache_file(std::filesystem::path const & dir, std::int64_t q);

/* Serialized container bytes. */
std::string encode_cache(form_class_group const & G, w_table const * W);

/*
 * Parses and validates a container for q. Returns nothing and fills
 * `problem` when the bytes are truncated, carry another version, or
 * describe an inconsistent group.
 */
std::optional<cache_entry> decode_cache(std::string const & bytes, std::int64_t q,
                                        std::string & problem);

/* Missing file: nothing, problem left empty. */
std::optional<cache_entry> load_cache(std::filesystem::path const & dir, std::int64_t q,
                                      std::string & problem);

/* Writes via a temporary file and rename. */
void store_cache(std::filesystem::path const & dir, form_class_group const & G, w_table const * W);

struct tabulate_summary {
    std::size_t written = 0;
    std::size_t reused = 0;
    std::vector<std::string> warnings;
};

/*
 * Ensures a blob with the class group and a w-table of at least N entries
 * exists for every q in D(Q). Blobs that already satisfy this are not
 * touched.
 */
tabulate_summary tabulate(std::filesystem::path const & dir, double Q, std::int64_t N,
                          unsigned threads = 1);

/* Class group from the cache when available, computed otherwise. */
form_class_group cached_class_group(std::optional<std::filesystem::path> const & dir, std::int64_t q,
                                    std::vector<std::string> & warnings);

} // namespace qforms

#endif
