// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors

#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

namespace tibsa {

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

/// Compact dump with sorted object keys. nlohmann::json already keeps
/// object members in a std::map, so dump() is canonical.
std::string canonical_dump(const nlohmann::json& value);

/// sha256_hex(canonical_dump(value))
std::string json_hash(const nlohmann::json& value);

/// Current wall-clock time as ISO-8601 UTC, second precision ("2026-01-02T03:04:05Z").
std::string utc_now_iso8601();

} // namespace tibsa
