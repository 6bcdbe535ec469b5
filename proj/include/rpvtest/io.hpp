#pragma once

// CSV ingestion and emission for `group,order_value` files, plus the content
// digest used to tag reports.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rpvtest/core.hpp"
#include "rpvtest/diagnostics.hpp"

namespace rpvtest::io {

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

}  // namespace detail

/*
 * Parse a decimal order value. Accepts plain and exponent notation; rejects
 * signs other than a leading '-' (which is then reported as negative),
 * inf/nan, and trailing characters. Conversion is correctly rounded, so
 * "12.50" yields exactly the double closest to 12.5.
 */
inline double parse_order_value(std::string_view text, std::size_t row) {
    text = detail::trim(text);
    if (text.empty()) {
        throw FormatError("empty order_value", row);
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw FormatError("order_value '" + std::string(text) + "' is not a decimal number", row);
    }
    if (!std::isfinite(v)) {
        throw FormatError("order_value '" + std::string(text) + "' is not finite", row);
    }
    if (v < 0.0 || (v == 0.0 && text.front() == '-')) {
        throw FormatError("order_value '" + std::string(text) + "' is negative", row);
    }
    return v;
}

inline ExperimentData read_csv(std::istream& in) {
    std::string line;
    std::size_t row = 0;
    if (!std::getline(in, line)) {
        throw FormatError("missing header 'group,order_value'", 1);
    }
    ++row;
    std::string_view header = line;
    if (header.starts_with("\xEF\xBB\xBF")) {
        header.remove_prefix(3);
    }
    if (detail::trim(header) != "group,order_value") {
        throw FormatError("missing header 'group,order_value'", 1);
    }

    std::vector<double> control, treatment;
    while (std::getline(in, line)) {
        ++row;
        const std::string_view body = detail::trim(line);
        if (body.empty()) {
            continue;
        }
        const auto comma = body.find(',');
        if (comma == std::string_view::npos || body.find(',', comma + 1) != std::string_view::npos) {
            throw FormatError("expected exactly two fields", row);
        }
        const std::string_view group = detail::trim(body.substr(0, comma));
        const double value = parse_order_value(body.substr(comma + 1), row);
        if (group == "control") {
            control.push_back(value);
        } else if (group == "treatment") {
            treatment.push_back(value);
        } else {
            throw FormatError("unknown group label '" + std::string(group) + "'", row);
        }
    }
    return ExperimentData(std::move(control), std::move(treatment));
}

inline ExperimentData load_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open '" + path + "'");
    }
    return read_csv(in);
}

/// Shortest decimal that parses back to the same double.
inline std::string format_value(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

inline void write_csv(const ExperimentData& data, std::ostream& out) {
    out << "group,order_value\n";
    for (double v : data.control()) {
        out << "control," << format_value(v) << '\n';
    }
    for (double v : data.treatment()) {
        out << "treatment," << format_value(v) << '\n';
    }
}

inline std::string to_csv(const ExperimentData& data) {
    std::ostringstream s;
    write_csv(data, s);
    return s.str();
}

inline void write_qq_csv(const QQData& qq, std::ostream& out) {
    out << "theoretical_z,empirical_z\n";
    for (const auto& p : qq.points) {
        out << format_value(p.theoretical_z) << ',' << format_value(p.empirical_z) << '\n';
    }
}

/// FNV-1a 64 over the canonical CSV form, as 16 hex digits.
inline std::string digest(const ExperimentData& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : to_csv(data)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace rpvtest::io
