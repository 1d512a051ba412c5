// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors

#pragma once

#include <string_view>

#include <json.hpp>

#include "tibsa/kb.hpp"

namespace tibsa::kb::detail {

TechniqueRecord parse_technique(const nlohmann::json& obj, std::size_t index);
AttackPatternRecord parse_attack_pattern(const nlohmann::json& obj, std::size_t index);
WeaknessRecord parse_weakness(const nlohmann::json& obj, std::size_t index);
VulnerabilityRecord parse_vulnerability(const nlohmann::json& obj, std::size_t index);

nlohmann::json to_json(const TechniqueRecord& r);
nlohmann::json to_json(const AttackPatternRecord& r);
nlohmann::json to_json(const WeaknessRecord& r);
nlohmann::json to_json(const VulnerabilityRecord& r);

nlohmann::json records_json(const KnowledgeBase& kb, CatalogKind kind);

std::size_t line_of(std::string_view text, std::size_t byte);
nlohmann::json parse_document(std::string_view document);

KnowledgeBase ingest_stix(const nlohmann::json& bundle, std::string_view source_name,
                          const std::string& content_hash);

} // namespace tibsa::kb::detail
