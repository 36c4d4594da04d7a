#ifndef DRI_DELIMITED_HPP
#define DRI_DELIMITED_HPP

#include <cstddef>
#include <istream>
#include <iterator>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dri/error.hpp"
#include "dri/fips.hpp"

namespace dri {

struct DelimitedRow {
    std::size_t line = 0;  // 1-based physical line where the record starts
    std::vector<std::string> fields;
};

/// A header-bearing delimited text table (RFC 4180 quoting, LF or CRLF).
class DelimitedTable {
public:
    static DelimitedTable parse(std::string_view text, char delimiter = ',') {
        DelimitedTable table;
        if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

        std::size_t pos = 0;
        std::size_t line = 1;
        bool have_header = false;
        while (pos < text.size()) {
            DelimitedRow row;
            row.line = line;
            std::string field;
            bool quoted = false;
            bool field_started = false;
            for (;;) {
                if (pos >= text.size()) {
                    if (quoted) throw ParseError(row.line, "", "", "unterminated quoted field");
                    row.fields.push_back(std::move(field));
                    break;
                }
                const char c = text[pos];
                if (quoted) {
                    if (c == '"') {
                        if (pos + 1 < text.size() && text[pos + 1] == '"') {
                            field.push_back('"');
                            pos += 2;
                        } else {
                            quoted = false;
                            ++pos;
                        }
                    } else {
                        if (c == '\n') ++line;
                        field.push_back(c);
                        ++pos;
                    }
                    continue;
                }
                if (c == '"' && !field_started) {
                    quoted = true;
                    field_started = true;
                    ++pos;
                } else if (c == delimiter) {
                    row.fields.push_back(std::move(field));
                    field.clear();
                    field_started = false;
                    ++pos;
                } else if (c == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') {
                    row.fields.push_back(std::move(field));
                    pos += 2;
                    ++line;
                    break;
                } else if (c == '\n') {
                    row.fields.push_back(std::move(field));
                    ++pos;
                    ++line;
                    break;
                } else {
                    field.push_back(c);
                    field_started = field_started || (c != ' ' && c != '\t');
                    ++pos;
                }
            }
            if (row.fields.size() == 1 && trim(row.fields[0]).empty()) continue;  // blank line
            if (!have_header) {
                for (auto& name : row.fields) name = std::string(trim(name));
                table.header_ = std::move(row.fields);
                have_header = true;
            } else {
                table.rows_.push_back(std::move(row));
            }
        }
        return table;
    }

    static DelimitedTable read(std::istream& in, char delimiter = ',') {
        std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
        return parse(text, delimiter);
    }

    const std::vector<std::string>& header() const noexcept { return header_; }
    const std::vector<DelimitedRow>& rows() const noexcept { return rows_; }

    std::optional<std::size_t> find_column(std::string_view name) const {
        for (std::size_t i = 0; i < header_.size(); ++i)
            if (header_[i] == name) return i;
        return std::nullopt;
    }

    std::size_t column(std::string_view name) const {
        if (auto idx = find_column(name)) return *idx;
        throw MissingColumn(std::string(name));
    }

private:
    std::vector<std::string> header_;
    std::vector<DelimitedRow> rows_;
};

/// RFC 4180 quoting for one output field.
inline std::string quote_field(std::string_view s, char delimiter = ',') {
    if (s.find_first_of(std::string{delimiter, '"', '\n', '\r'}) == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace dri

#endif  // DRI_DELIMITED_HPP
