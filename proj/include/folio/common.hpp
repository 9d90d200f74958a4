#pragma once

#include <charconv>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>

namespace folio {

// Single exception type for all contract violations. Messages name the
// offending node/parameter/file so failures are actionable from the CLI.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

namespace detail {
inline void msg_append(std::ostringstream&) {}
template <typename T, typename... Rest>
void msg_append(std::ostringstream& os, const T& v, const Rest&... rest) {
    os << v;
    msg_append(os, rest...);
}
} // namespace detail

template <typename... Args>
std::string msg(const Args&... args) {
    std::ostringstream os;
    os.precision(17);
    detail::msg_append(os, args...);
    return os.str();
}

template <typename... Args>
[[noreturn]] void fail(const Args&... args) {
    throw Error(msg(args...));
}

template <typename... Args>
void require(bool cond, const Args&... args) {
    if (!cond) fail(args...);
}

// Shortest decimal representation that round-trips the exact double, so
// serialized numbers are reproducible across runs.
inline std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace folio
