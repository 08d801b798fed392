#pragma once

#include <charconv>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "advect/error.hpp"

namespace advect::csv {

/// Shortest round-trip decimal form; empty for NaN (the undefined-value marker).
inline std::string number(double v) {
    if (std::isnan(v)) return {};
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) v = 0.0; // drop negative zero
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string number(const std::optional<double>& v) { return v ? number(*v) : std::string{}; }

inline std::string field(std::string_view s) {
    if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    template <typename... Cells>
    void row(const Cells&... cells) {
        bool first = true;
        ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
        out_ << '\n';
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << field(cells[i]);
        out_ << '\n';
    }

private:
    static std::string cell(const std::string& s) { return field(s); }
    static std::string cell(std::string_view s) { return field(s); }
    static std::string cell(const char* s) { return field(s); }
    static std::string cell(double v) { return number(v); }
    static std::string cell(const std::optional<double>& v) { return number(v); }
    template <typename T>
        requires std::is_integral_v<T>
    static std::string cell(T v) {
        return std::to_string(v);
    }

    std::ostream& out_;
};

/// Splits one CSV record (RFC 4180 quoting, no embedded newlines).
inline std::vector<std::string> parse_line(std::string_view line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

inline double parse_number(const std::string& s, std::size_t line) {
    if (s.empty()) return std::nan("");
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw ParseError("bad number '" + s + "'", line);
        return v;
    } catch (const std::logic_error&) {
        throw ParseError("bad number '" + s + "'", line);
    }
}

/// Reads a CSV with a header row; checks the header matches `expected`.
inline std::vector<std::vector<std::string>> read_table(std::istream& in, const std::vector<std::string>& expected) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty CSV input", 1);
    if (parse_line(line) != expected) throw ParseError("unexpected CSV header '" + line + "'", 1);
    std::vector<std::vector<std::string>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto r = parse_line(line);
        if (r.size() != expected.size())
            throw ParseError("expected " + std::to_string(expected.size()) + " fields", lineno);
        rows.push_back(std::move(r));
    }
    return rows;
}

} // namespace advect::csv
