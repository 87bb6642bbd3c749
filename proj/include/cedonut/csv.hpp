// SPDX-License-Identifier: Apache-2.0
#ifndef CEDONUT_CSV_HPP
#define CEDONUT_CSV_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace cedonut {

inline constexpr const char* version_tag = "cedonut-1.0.0";

using Cell = std::variant<std::string, double, std::int64_t>;

/// A result table plus the provenance written as `#` comment lines above the header.
struct Table {
    std::string experiment;
    std::uint64_t master_seed = 0;
    std::vector<std::pair<std::string, std::string>> provenance;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void note(std::string key, std::string value) { provenance.emplace_back(std::move(key), std::move(value)); }
    void add_row(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

/// 12 significant digits, '.' decimal separator regardless of locale.
inline std::string format_number(double value)
{
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    std::string out(buf);
    for (auto& c : out)
        if (c == ',') c = '.';
    return out;
}

inline std::string csv_escape(const std::string& field)
{
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string format_cell(const Cell& cell)
{
    if (const auto* s = std::get_if<std::string>(&cell)) return csv_escape(*s);
    if (const auto* d = std::get_if<double>(&cell)) return format_number(*d);
    return std::to_string(std::get<std::int64_t>(cell));
}

inline void write_csv(std::ostream& out, const Table& table)
{
    out << "# experiment: " << table.experiment << '\n';
    out << "# master_seed: " << table.master_seed << '\n';
    out << "# version: " << version_tag << '\n';
    for (const auto& [key, value] : table.provenance) out << "# " << key << ": " << value << '\n';
    for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << csv_escape(table.columns[c]);
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_cell(row[c]);
        out << '\n';
    }
}

} // namespace cedonut

#endif // CEDONUT_CSV_HPP
