// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors

#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace tibsa::kb {

inline constexpr std::string_view kCatalogSchemaVersion = "1";

/// Ingest kinds. The first four are native catalog documents; StixBundle
/// converts a STIX 2.x bundle of attack-pattern objects into techniques.
enum class CatalogKind { Techniques, AttackPatterns, Weaknesses, Vulnerabilities, StixBundle };

std::string_view to_string(CatalogKind kind);
CatalogKind parse_catalog_kind(std::string_view text);

struct TechniqueRecord {
    std::string id;
    std::string name;
    std::vector<std::string> tactic_ids;
    std::optional<std::string> parent_id;
    std::vector<std::string> platforms;
    std::vector<std::string> attack_pattern_refs;
    std::string source;
    nlohmann::json extra = nlohmann::json::object(); // unknown fields, preserved on round-trip

    bool operator==(const TechniqueRecord&) const = default;
};

struct AttackPatternRecord {
    std::string id;
    std::string name;
    std::vector<std::string> weakness_refs;
    nlohmann::json extra = nlohmann::json::object();

    bool operator==(const AttackPatternRecord&) const = default;
};

struct WeaknessRecord {
    std::string id;
    std::string name;
    std::vector<std::string> vulnerability_refs;
    nlohmann::json extra = nlohmann::json::object();

    bool operator==(const WeaknessRecord&) const = default;
};

struct VulnerabilityRecord {
    std::string id;
    std::string name;
    std::vector<std::string> asset_types; // affected platform / asset-type tags
    nlohmann::json extra = nlohmann::json::object();

    bool operator==(const VulnerabilityRecord&) const = default;
};

struct Provenance {
    std::string source;
    std::string content_hash;
    std::string ingested_at;

    bool operator==(const Provenance&) const = default;
};

/// Merged catalog of every record kind, indexed by id. Treated as
/// immutable once ingest or merge has returned it.
///
/// Equality compares records only; provenance is bookkeeping.
class KnowledgeBase {
public:
    const TechniqueRecord* find_technique(std::string_view id) const;
    const AttackPatternRecord* find_attack_pattern(std::string_view id) const;
    const WeaknessRecord* find_weakness(std::string_view id) const;
    const VulnerabilityRecord* find_vulnerability(std::string_view id) const;

    const std::map<std::string, TechniqueRecord, std::less<>>& techniques() const { return techniques_; }
    const std::map<std::string, AttackPatternRecord, std::less<>>& attack_patterns() const { return patterns_; }
    const std::map<std::string, WeaknessRecord, std::less<>>& weaknesses() const { return weaknesses_; }
    const std::map<std::string, VulnerabilityRecord, std::less<>>& vulnerabilities() const { return vulnerabilities_; }
    const std::vector<Provenance>& provenance() const { return provenance_; }

    std::size_t size() const;
    bool empty() const { return size() == 0; }

    /// Hash over the record content of all four kinds (provenance excluded).
    std::string content_hash() const;

    /// Inserters used while constructing. Throw ConflictError when the id is
    /// already present with different content; identical records are a no-op.
    void add(TechniqueRecord record);
    void add(AttackPatternRecord record);
    void add(WeaknessRecord record);
    void add(VulnerabilityRecord record);
    void add_provenance(Provenance entry);

    bool operator==(const KnowledgeBase& other) const;

private:
    std::map<std::string, TechniqueRecord, std::less<>> techniques_;
    std::map<std::string, AttackPatternRecord, std::less<>> patterns_;
    std::map<std::string, WeaknessRecord, std::less<>> weaknesses_;
    std::map<std::string, VulnerabilityRecord, std::less<>> vulnerabilities_;
    std::vector<Provenance> provenance_;
};

/// Parse one catalog document. Duplicate ids inside the document are a
/// ConflictError; schema problems are a ParseError naming line or field.
KnowledgeBase ingest_catalog(std::string_view document, CatalogKind kind,
                             std::string_view source_name = "inline");

KnowledgeBase merge_catalogs(const KnowledgeBase& a, const KnowledgeBase& b);

enum class LinkKind { Technique, AttackPattern, Weakness, Vulnerability, AssetType };
std::string_view to_string(LinkKind kind);

struct ChainLink {
    LinkKind kind;
    std::string id;
    bool resolved = true; // false when the stored reference has no record

    bool operator==(const ChainLink&) const = default;
};
using Chain = std::vector<ChainLink>;

/// Every technique -> pattern -> weakness -> vulnerability -> asset-type
/// chain reachable through stored references, ordered lexicographically by
/// id at each level. A dangling reference terminates its chain.
std::vector<Chain> resolve_chain(const KnowledgeBase& kb, std::string_view technique_id);

struct Finding {
    std::string source_kind;
    std::string source_id;
    std::string field;
    std::string target_id;

    std::string message() const;
    auto operator<=>(const Finding&) const = default;
};

struct ValidationReport {
    std::vector<Finding> findings;
    bool ok() const { return findings.empty(); }
};

/// Dangling cross-references, sorted. Advisory: never throws.
ValidationReport validate_catalog(const KnowledgeBase& kb);

/// Native catalog document for one kind (pretty-printed JSON).
std::string serialize_catalog(const KnowledgeBase& kb, CatalogKind kind);

/// Bundle of all four native documents: {"schema_version":"1","catalogs":[...]}.
nlohmann::json to_bundle(const KnowledgeBase& kb);
KnowledgeBase from_bundle(const nlohmann::json& bundle);

/// Ingest an already-parsed native catalog document.
KnowledgeBase ingest_catalog_json(const nlohmann::json& document, CatalogKind kind,
                                  std::string_view source_name = "inline");

} // namespace tibsa::kb
