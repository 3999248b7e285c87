#ifndef QFORMS_CLI_HPP
#define QFORMS_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace qforms::cli {

enum exit_code : int {
    ok = 0,
    usage_error = 1,
    unresolved = 2,
    identity_violation = 3,
};

/* Parameter caps enforced before any computation starts. */
inline constexpr double max_Q = 1'000'000;
inline constexpr std::uint64_t max_X = 100'000'000;
inline constexpr std::int64_t max_N = 10'000'000;
inline constexpr unsigned max_threads = 256;

/* args excludes the program name. */
int run(std::vector<std::string> const & args, std::ostream & out, std::ostream & err);

} // namespace qforms::cli

#endif
