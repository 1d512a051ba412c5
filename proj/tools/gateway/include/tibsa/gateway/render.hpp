// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace tibsa::gateway {

enum class Format { Json, Table, Csv };
Format parse_format(std::string_view text);

struct Table {
    std::vector<std::string> headers;
    std::vector<std::vector<std::string>> rows;
};

/// One column per (header, key) pair, one row per element of `rows`.
Table table_from(const nlohmann::json& rows, const std::vector<std::pair<std::string, std::string>>& columns);

/// Scalar cell text: strings verbatim, integral numbers without a decimal
/// point, arrays joined by spaces.
std::string cell_text(const nlohmann::json& value);

std::string render_table(const Table& table);
std::string render_csv(const Table& table);

/// JSON is always available; table/csv fall back to JSON when no table is given.
std::string render(const nlohmann::json& doc, const std::optional<Table>& table, Format format);

} // namespace tibsa::gateway
