#ifndef RETSIM_CSV_HPP
#define RETSIM_CSV_HPP

#include <charconv>
#include <string>
#include <system_error>

namespace retsim {
namespace csv {

// Shortest decimal form that round-trips to the same double, so output files
// are byte-stable across runs and worker counts.
inline std::string format(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace csv
}  // namespace retsim

#endif
