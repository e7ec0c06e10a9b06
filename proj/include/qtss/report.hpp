#pragma once

// Machine-readable output: line-delimited records of the form
//   <kind> key=value key=value ...
// with a schema version record up front, so golden files survive additive
// change. Serialization and parsing are exact inverses for the permitted
// character set (no spaces or newlines inside keys or values).

#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qtss {

struct Record {
    std::string kind;
    std::vector<std::pair<std::string, std::string>> fields;

    Record& add(std::string key, std::string value) {
        fields.emplace_back(std::move(key), std::move(value));
        return *this;
    }
    Record& add(std::string key, std::uint64_t value) {
        return add(std::move(key), std::to_string(value));
    }
    Record& add(std::string key, std::int64_t value) {
        return add(std::move(key), std::to_string(value));
    }

    bool operator==(const Record&) const = default;
};

// Round-trippable double formatting (17 significant digits).
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {
inline void check_token(std::string_view token, bool is_key) {
    if (token.empty()) throw std::invalid_argument("record token must be non-empty");
    for (char c : token) {
        if (c == ' ' || c == '\n' || c == '\t')
            throw std::invalid_argument("record token must not contain whitespace");
        if (is_key && c == '=')
            throw std::invalid_argument("record key must not contain '='");
    }
}
}  // namespace detail

inline std::string serialize_records(const std::vector<Record>& records) {
    std::string out;
    for (const auto& rec : records) {
        detail::check_token(rec.kind, /*is_key=*/true);
        out += rec.kind;
        for (const auto& [key, value] : rec.fields) {
            detail::check_token(key, true);
            detail::check_token(value, false);
            out.push_back(' ');
            out += key;
            out.push_back('=');
            out += value;
        }
        out.push_back('\n');
    }
    return out;
}

inline std::vector<Record> parse_records(std::string_view text) {
    std::vector<Record> records;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        if (line.empty()) continue;

        Record rec;
        std::size_t cursor = 0;
        while (cursor < line.size()) {
            std::size_t space = line.find(' ', cursor);
            if (space == std::string_view::npos) space = line.size();
            std::string_view token = line.substr(cursor, space - cursor);
            cursor = space + 1;
            if (token.empty()) continue;
            if (rec.kind.empty()) {
                rec.kind = std::string(token);
                continue;
            }
            const std::size_t eq = token.find('=');
            if (eq == std::string_view::npos)
                throw std::invalid_argument("record field without '=': " + std::string(token));
            rec.fields.emplace_back(std::string(token.substr(0, eq)),
                                    std::string(token.substr(eq + 1)));
        }
        if (rec.kind.empty()) throw std::invalid_argument("record line without kind");
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace qtss
