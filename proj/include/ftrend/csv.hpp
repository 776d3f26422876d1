#pragma once

#include <charconv>
#include <initializer_list>
#include <cmath>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <vector>

namespace ftrend::csv {

[[nodiscard]] inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

[[nodiscard]] inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        auto next = line.find(sep, pos);
        out.push_back(trim(line.substr(pos, next == std::string_view::npos ? std::string_view::npos
                                                                           : next - pos)));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

/// True for blank lines and '#' comments.
[[nodiscard]] inline bool skippable(std::string_view line) {
    auto t = trim(line);
    return t.empty() || t.front() == '#';
}

[[nodiscard]] inline std::optional<int> parse_int(std::string_view s) {
    int v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
}

[[nodiscard]] inline std::optional<double> parse_double(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

/// Shortest decimal text that parses back to the same double.
[[nodiscard]] inline std::string format(double v) {
    if (std::isnan(v)) return "NaN";
    if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, p};
}

/// Minimal row writer: doubles use the round-trip format above.
class Writer {
public:
    explicit Writer(std::ostream& os) : os_(os) {}

    Writer& header(std::initializer_list<std::string_view> names) {
        bool first = true;
        for (auto n : names) {
            if (!first) os_ << ',';
            os_ << n;
            first = false;
        }
        os_ << '\n';
        return *this;
    }

    Writer& header(std::span<const std::string> names) {
        for (std::size_t i = 0; i < names.size(); ++i) os_ << (i ? "," : "") << names[i];
        os_ << '\n';
        return *this;
    }

    template <class... Cells>
    Writer& row(const Cells&... cells) {
        bool first = true;
        ((put(cells, first)), ...);
        os_ << '\n';
        return *this;
    }

    Writer& row(std::span<const double> cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << format(cells[i]);
        os_ << '\n';
        return *this;
    }

private:
    template <class T>
    void put(const T& v, bool& first) {
        if (!first) os_ << ',';
        first = false;
        if constexpr (std::is_floating_point_v<T>) {
            os_ << format(static_cast<double>(v));
        } else {
            os_ << v;
        }
    }

    std::ostream& os_;
};

}  // namespace ftrend::csv
