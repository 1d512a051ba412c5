// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tibsa/assessment.hpp"

namespace tibsa::registry {

inline constexpr std::string_view kRegisterSchemaVersion = "1";

struct AuditEntry {
    std::uint64_t seq = 0;
    std::string at;
    std::string actor;
    std::string action;
    std::string assessment_id;
    std::string content_hash;

    bool operator==(const AuditEntry&) const = default;
};

/// Assessments by id, knowledge-base snapshots by content hash and an
/// append-only audit log.
struct RiskRegister {
    std::map<std::string, Assessment> assessments;
    std::map<std::string, nlohmann::json> kb_snapshots; // kb bundle documents
    std::vector<AuditEntry> audit_log;

    Assessment& get(std::string_view id);
    const Assessment& get(std::string_view id) const;

    /// Appends one audit entry with the next sequence number.
    void record(std::string actor, std::string action, std::string assessment_id, std::string content_hash,
                std::string at);

    /// Inserts or replaces an assessment and records the mutation.
    void put(Assessment a, std::string actor, std::string action);

    void store_kb(const kb::KnowledgeBase& kb);
    kb::KnowledgeBase kb_for(const Assessment& a) const;

    bool operator==(const RiskRegister&) const = default;
};

/// {"schema_version":"1","checksum":sha256(payload),"payload":{...}}, pretty
/// printed with sorted keys so save/load/save is byte-identical.
std::string serialize_register(const RiskRegister& r);
/// VersionError on schema mismatch, ParseError on a bad checksum or payload.
RiskRegister parse_register(std::string_view bytes);

/// Writes through a temporary file and rename. IoError on failure.
void save_register(const RiskRegister& r, const std::filesystem::path& destination);
/// IoError when unreadable; an absent file yields an empty register only when
/// `missing_ok` is set.
RiskRegister load_register(const std::filesystem::path& source, bool missing_ok = false);

nlohmann::json to_json(const AuditEntry& e);

} // namespace tibsa::registry
