// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors

#include "tibsa/gateway/render.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tibsa/error.hpp"

namespace tibsa::gateway {

using nlohmann::json;

Format parse_format(std::string_view text) {
    if (text == "json") return Format::Json;
    if (text == "table") return Format::Table;
    if (text == "csv") return Format::Csv;
    throw ParseError("--format", "expected json, table or csv");
}

std::string cell_text(const json& value) {
    if (value.is_null()) return "";
    if (value.is_string()) return value.get<std::string>();
    if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
    if (value.is_number_integer()) return std::to_string(value.get<long long>());
    if (value.is_number_float()) {
        const double d = value.get<double>();
        if (std::isfinite(d) && d == std::floor(d) && std::fabs(d) < 1e15) return std::to_string(static_cast<long long>(d));
        std::ostringstream out;
        out.precision(6);
        out << d;
        return out.str();
    }
    if (value.is_array()) {
        std::string out;
        for (const auto& item : value) {
            if (!out.empty()) out += ' ';
            out += cell_text(item);
        }
        return out;
    }
    return value.dump();
}

Table table_from(const json& rows, const std::vector<std::pair<std::string, std::string>>& columns) {
    Table t;
    for (const auto& [header, key] : columns) t.headers.push_back(header);
    for (const auto& row : rows) {
        std::vector<std::string> cells;
        for (const auto& [header, key] : columns) cells.push_back(row.contains(key) ? cell_text(row[key]) : "");
        t.rows.push_back(std::move(cells));
    }
    return t;
}

std::string render_table(const Table& table) {
    std::vector<std::size_t> width(table.headers.size(), 0);
    for (std::size_t c = 0; c < table.headers.size(); ++c) width[c] = table.headers[c].size();
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size() && c < width.size(); ++c) width[c] = std::max(width[c], row[c].size());
    }
    std::ostringstream out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t c = 0; c < width.size(); ++c) {
            const std::string& text = c < cells.size() ? cells[c] : std::string();
            out << text;
            if (c + 1 < width.size()) out << std::string(width[c] - text.size() + 2, ' ');
        }
        out << '\n';
    };
    line(table.headers);
    std::vector<std::string> rule;
    for (auto w : width) rule.emplace_back(w, '-');
    line(rule);
    for (const auto& row : table.rows) line(row);
    return out.str();
}

namespace {

std::string csv_field(const std::string& value) {
    if (value.find_first_of(",\"\n") == std::string::npos) return value;
    std::string out = "\"";
    for (char c : value) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

} // namespace

std::string render_csv(const Table& table) {
    std::ostringstream out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t c = 0; c < cells.size(); ++c) out << (c ? "," : "") << csv_field(cells[c]);
        out << '\n';
    };
    line(table.headers);
    for (const auto& row : table.rows) line(row);
    return out.str();
}

std::string render(const json& doc, const std::optional<Table>& table, Format format) {
    if (format == Format::Json || !table) return doc.dump(2) + "\n";
    return format == Format::Table ? render_table(*table) : render_csv(*table);
}

} // namespace tibsa::gateway
