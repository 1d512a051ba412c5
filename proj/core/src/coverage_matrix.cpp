// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors

#include <sstream>

#include "tibsa/effectiveness.hpp"
#include "tibsa/error.hpp"

namespace tibsa::effectiveness {

CoverageMatrix coverage_matrix(std::span<const ControlRecord> controls, std::span<const MitigationEntry> entries,
                               std::span<const std::string> ttps) {
    CoverageMatrix m;
    m.ttp_ids.assign(ttps.begin(), ttps.end());
    for (const auto& control : controls) {
        m.control_ids.push_back(control.id);
        std::vector<Cell> row(ttps.size());
        for (const auto& e : entries) {
            if (e.control_id != control.id) continue;
            for (std::size_t col = 0; col < ttps.size(); ++col) {
                if (ttps[col] == e.ttp_id) row[col].push_back({e.criterion, e.level});
            }
        }
        m.cells.push_back(std::move(row));
    }
    return m;
}

std::string render_cell(const Cell& cell) {
    std::string out;
    for (const auto& entry : cell) {
        if (!out.empty()) out += ' ';
        out += entry.criterion.code();
        out += '.';
        out += level_letter(entry.level);
    }
    return out;
}

Cell parse_cell(std::string_view text) {
    Cell cell;
    std::istringstream in{std::string(text)};
    std::string token;
    while (in >> token) {
        const auto dot = token.rfind('.');
        if (dot == std::string::npos || dot == 0 || dot + 2 != token.size()) {
            throw ParseError("cell", "expected CODE.LEVEL, got '" + token + "'");
        }
        cell.push_back({Criterion(token.substr(0, dot)), parse_level(token.substr(dot + 1))});
    }
    return cell;
}

namespace {

std::string csv_field(const std::string& value) {
    if (value.find_first_of(",\"\n") == std::string::npos) return value;
    std::string out = "\"";
    for (char c : value) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::vector<std::string>> parse_csv_rows(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        any = true;
        if (quoted) {
            if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            row.push_back(std::move(field));
            field.clear();
            rows.push_back(std::move(row));
            row.clear();
            any = false;
        } else if (c != '\r') {
            field += c;
        }
    }
    if (quoted) throw ParseError("csv", "unterminated quoted field");
    if (any) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

std::string render_csv(const CoverageMatrix& matrix) {
    std::string out = "control_id";
    for (const auto& ttp : matrix.ttp_ids) out += "," + csv_field(ttp);
    out += '\n';
    for (std::size_t r = 0; r < matrix.control_ids.size(); ++r) {
        out += csv_field(matrix.control_ids[r]);
        for (std::size_t c = 0; c < matrix.ttp_ids.size(); ++c) out += "," + csv_field(render_cell(matrix.at(r, c)));
        out += '\n';
    }
    return out;
}

CoverageMatrix parse_csv(std::string_view text) {
    const auto rows = parse_csv_rows(text);
    if (rows.empty() || rows.front().empty() || rows.front().front() != "control_id") {
        throw ParseError("line 1", "expected header starting with control_id");
    }
    CoverageMatrix m;
    m.ttp_ids.assign(rows.front().begin() + 1, rows.front().end());
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() != m.ttp_ids.size() + 1) {
            throw ParseError("line " + std::to_string(i + 1), "expected " + std::to_string(m.ttp_ids.size() + 1) + " fields");
        }
        m.control_ids.push_back(row.front());
        std::vector<Cell> cells;
        for (std::size_t c = 1; c < row.size(); ++c) cells.push_back(parse_cell(row[c]));
        m.cells.push_back(std::move(cells));
    }
    return m;
}

} // namespace tibsa::effectiveness
