#pragma once

// Small replacement for escna::format: the system toolchain's standard library
// predates <format>. Covers exactly what this project uses: positional "{}"
// in order, "{:.Nf}" and "{:.Ne}" on doubles, "{:0Nx}" on integers, plus
// "{{"/"}}" escapes. Strings, bools, chars and integers print the obvious
// way; a plain "{}" on a double prints the shortest round-trip form.

#include <charconv>
#include <cstdio>
#include <string>
#include <string_view>
#include <type_traits>

namespace escna {

namespace fmtdetail {

inline void append_value(std::string& out, std::string_view, std::string_view v) { out += v; }
inline void append_value(std::string& out, std::string_view, const char* v) { out += v; }
inline void append_value(std::string& out, std::string_view, const std::string& v) { out += v; }
inline void append_value(std::string& out, std::string_view, bool v) {
    out += v ? "true" : "false";
}
inline void append_value(std::string& out, std::string_view, char v) { out += v; }

inline void append_value(std::string& out, std::string_view spec, double v) {
    char buf[64];
    if (spec.empty()) {
        const auto res = std::to_chars(buf, buf + sizeof buf, v);
        out.append(buf, res.ptr);
        return;
    }
    char pat[16];
    std::snprintf(pat, sizeof pat, "%%%.*s", static_cast<int>(spec.size()), spec.data());
    std::snprintf(buf, sizeof buf, pat, v);
    out += buf;
}

template <typename T>
    requires(std::is_integral_v<T> && !std::is_same_v<T, bool> && !std::is_same_v<T, char>)
void append_value(std::string& out, std::string_view spec, T v) {
    char buf[32];
    if (spec.empty()) {
        const auto res = std::to_chars(buf, buf + sizeof buf, v);
        out.append(buf, res.ptr);
        return;
    }
    // Integer specs end in a type letter; rebuild against (unsigned) long long.
    char pat[16];
    std::snprintf(pat, sizeof pat, "%%%.*sll%c", static_cast<int>(spec.size() - 1), spec.data(),
                  spec.back());
    std::snprintf(buf, sizeof buf, pat, static_cast<unsigned long long>(v));
    out += buf;
}

inline void run(std::string& out, std::string_view fmt) {
    std::size_t i = 0;
    while (i < fmt.size()) {
        if ((fmt[i] == '{' || fmt[i] == '}') && i + 1 < fmt.size() && fmt[i + 1] == fmt[i]) {
            out += fmt[i];
            i += 2;
            continue;
        }
        out += fmt[i++];
    }
}

template <typename Arg, typename... Rest>
void run(std::string& out, std::string_view fmt, const Arg& arg, const Rest&... rest) {
    std::size_t i = 0;
    while (i < fmt.size()) {
        if ((fmt[i] == '{' || fmt[i] == '}') && i + 1 < fmt.size() && fmt[i + 1] == fmt[i]) {
            out += fmt[i];
            i += 2;
            continue;
        }
        if (fmt[i] == '{') {
            const std::size_t close = fmt.find('}', i);
            if (close == std::string_view::npos) {
                out += fmt.substr(i);
                return;
            }
            std::string_view spec = fmt.substr(i + 1, close - i - 1);
            if (!spec.empty() && spec.front() == ':') spec.remove_prefix(1);
            append_value(out, spec, arg);
            run(out, fmt.substr(close + 1), rest...);
            return;
        }
        out += fmt[i++];
    }
}

} // namespace fmtdetail

template <typename... Args>
std::string format(std::string_view fmt, const Args&... args) {
    std::string out;
    out.reserve(fmt.size() + 16 * sizeof...(Args));
    fmtdetail::run(out, fmt, args...);
    return out;
}

} // namespace escna
