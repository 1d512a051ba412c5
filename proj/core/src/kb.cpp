// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors

#include "tibsa/kb.hpp"

#include <algorithm>
#include <set>

#include "tibsa/error.hpp"
#include "tibsa/hash.hpp"
#include "kb_detail.hpp"

namespace tibsa::kb {

using nlohmann::json;

std::string_view to_string(CatalogKind kind) {
    switch (kind) {
    case CatalogKind::Techniques: return "techniques";
    case CatalogKind::AttackPatterns: return "attack_patterns";
    case CatalogKind::Weaknesses: return "weaknesses";
    case CatalogKind::Vulnerabilities: return "vulnerabilities";
    case CatalogKind::StixBundle: return "stix";
    }
    return "unknown";
}

CatalogKind parse_catalog_kind(std::string_view text) {
    if (text == "techniques") return CatalogKind::Techniques;
    if (text == "attack_patterns") return CatalogKind::AttackPatterns;
    if (text == "weaknesses") return CatalogKind::Weaknesses;
    if (text == "vulnerabilities") return CatalogKind::Vulnerabilities;
    if (text == "stix") return CatalogKind::StixBundle;
    throw ParseError("kind", "unknown catalog kind '" + std::string(text) + "'");
}

std::string_view to_string(LinkKind kind) {
    switch (kind) {
    case LinkKind::Technique: return "technique";
    case LinkKind::AttackPattern: return "attack_pattern";
    case LinkKind::Weakness: return "weakness";
    case LinkKind::Vulnerability: return "vulnerability";
    case LinkKind::AssetType: return "asset_type";
    }
    return "unknown";
}

// --- KnowledgeBase ---------------------------------------------------------

namespace {

template <typename Map>
auto find_in(const Map& map, std::string_view id) -> const typename Map::mapped_type* {
    auto it = map.find(id);
    return it == map.end() ? nullptr : &it->second;
}

template <typename Map, typename Record>
void insert_record(Map& map, Record record, std::string_view kind) {
    auto it = map.find(record.id);
    if (it == map.end()) {
        std::string id = record.id;
        map.emplace(std::move(id), std::move(record));
        return;
    }
    if (!(it->second == record)) {
        throw ConflictError(record.id, std::string(kind) + " '" + record.id +
                                           "' has conflicting content in merged catalogs");
    }
}

} // namespace

const TechniqueRecord* KnowledgeBase::find_technique(std::string_view id) const {
    return find_in(techniques_, id);
}
const AttackPatternRecord* KnowledgeBase::find_attack_pattern(std::string_view id) const {
    return find_in(patterns_, id);
}
const WeaknessRecord* KnowledgeBase::find_weakness(std::string_view id) const {
    return find_in(weaknesses_, id);
}
const VulnerabilityRecord* KnowledgeBase::find_vulnerability(std::string_view id) const {
    return find_in(vulnerabilities_, id);
}

std::size_t KnowledgeBase::size() const {
    return techniques_.size() + patterns_.size() + weaknesses_.size() + vulnerabilities_.size();
}

void KnowledgeBase::add(TechniqueRecord record) { insert_record(techniques_, std::move(record), "technique"); }
void KnowledgeBase::add(AttackPatternRecord record) { insert_record(patterns_, std::move(record), "attack pattern"); }
void KnowledgeBase::add(WeaknessRecord record) { insert_record(weaknesses_, std::move(record), "weakness"); }
void KnowledgeBase::add(VulnerabilityRecord record) { insert_record(vulnerabilities_, std::move(record), "vulnerability"); }

void KnowledgeBase::add_provenance(Provenance entry) {
    const bool known = std::any_of(provenance_.begin(), provenance_.end(), [&](const Provenance& p) {
        return p.content_hash == entry.content_hash && p.source == entry.source;
    });
    if (!known) provenance_.push_back(std::move(entry));
}

bool KnowledgeBase::operator==(const KnowledgeBase& other) const {
    return techniques_ == other.techniques_ && patterns_ == other.patterns_ &&
           weaknesses_ == other.weaknesses_ && vulnerabilities_ == other.vulnerabilities_;
}

std::string KnowledgeBase::content_hash() const {
    json records = json::object();
    for (auto kind : {CatalogKind::Techniques, CatalogKind::AttackPatterns, CatalogKind::Weaknesses,
                      CatalogKind::Vulnerabilities}) {
        records[std::string(to_string(kind))] = detail::records_json(*this, kind);
    }
    return json_hash(records);
}

// --- record (de)serialization ----------------------------------------------

namespace detail {

namespace {

std::string field_path(std::size_t index, std::string_view field) {
    return "records[" + std::to_string(index) + "]." + std::string(field);
}

std::string require_string(const json& obj, std::size_t index, std::string_view field) {
    auto it = obj.find(field);
    if (it == obj.end()) throw ParseError(field_path(index, field), "missing required field");
    if (!it->is_string()) throw ParseError(field_path(index, field), "expected a string");
    return it->get<std::string>();
}

std::string optional_string(const json& obj, std::size_t index, std::string_view field) {
    auto it = obj.find(field);
    if (it == obj.end() || it->is_null()) return {};
    if (!it->is_string()) throw ParseError(field_path(index, field), "expected a string");
    return it->get<std::string>();
}

std::vector<std::string> string_list(const json& obj, std::size_t index, std::string_view field) {
    auto it = obj.find(field);
    if (it == obj.end() || it->is_null()) return {};
    if (!it->is_array()) throw ParseError(field_path(index, field), "expected an array of strings");
    std::vector<std::string> out;
    out.reserve(it->size());
    for (std::size_t i = 0; i < it->size(); ++i) {
        const auto& item = (*it)[i];
        if (!item.is_string() || item.get_ref<const std::string&>().empty()) {
            throw ParseError(field_path(index, field) + "[" + std::to_string(i) + "]",
                             "expected a non-empty string");
        }
        out.push_back(item.get<std::string>());
    }
    return out;
}

json extras(const json& obj, std::initializer_list<std::string_view> known) {
    json out = json::object();
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) == known.end()) out[it.key()] = it.value();
    }
    return out;
}

std::string require_id(const json& obj, std::size_t index) {
    std::string id = require_string(obj, index, "id");
    if (id.empty()) throw ParseError(field_path(index, "id"), "id must be non-empty");
    return id;
}

void put_extras(json& out, const json& extra) {
    for (auto it = extra.begin(); it != extra.end(); ++it) {
        if (!out.contains(it.key())) out[it.key()] = it.value();
    }
}

} // namespace

TechniqueRecord parse_technique(const json& obj, std::size_t index) {
    TechniqueRecord r;
    r.id = require_id(obj, index);
    r.name = optional_string(obj, index, "name");
    r.tactic_ids = string_list(obj, index, "tactic_ids");
    if (r.tactic_ids.empty()) throw ParseError(field_path(index, "tactic_ids"), "at least one tactic id required");
    auto parent = obj.find("parent_id");
    if (parent != obj.end() && !parent->is_null()) {
        if (!parent->is_string() || parent->get_ref<const std::string&>().empty()) {
            throw ParseError(field_path(index, "parent_id"), "expected a non-empty string");
        }
        r.parent_id = parent->get<std::string>();
    }
    r.platforms = string_list(obj, index, "platforms");
    r.attack_pattern_refs = string_list(obj, index, "attack_pattern_refs");
    r.source = optional_string(obj, index, "source");
    r.extra = extras(obj, {"id", "name", "tactic_ids", "parent_id", "platforms", "attack_pattern_refs", "source"});
    return r;
}

AttackPatternRecord parse_attack_pattern(const json& obj, std::size_t index) {
    AttackPatternRecord r;
    r.id = require_id(obj, index);
    r.name = optional_string(obj, index, "name");
    r.weakness_refs = string_list(obj, index, "weakness_refs");
    r.extra = extras(obj, {"id", "name", "weakness_refs"});
    return r;
}

WeaknessRecord parse_weakness(const json& obj, std::size_t index) {
    WeaknessRecord r;
    r.id = require_id(obj, index);
    r.name = optional_string(obj, index, "name");
    r.vulnerability_refs = string_list(obj, index, "vulnerability_refs");
    r.extra = extras(obj, {"id", "name", "vulnerability_refs"});
    return r;
}

VulnerabilityRecord parse_vulnerability(const json& obj, std::size_t index) {
    VulnerabilityRecord r;
    r.id = require_id(obj, index);
    r.name = optional_string(obj, index, "name");
    r.asset_types = string_list(obj, index, "asset_types");
    r.extra = extras(obj, {"id", "name", "asset_types"});
    return r;
}

json to_json(const TechniqueRecord& r) {
    json out{{"id", r.id}, {"name", r.name}, {"tactic_ids", r.tactic_ids},
             {"platforms", r.platforms}, {"attack_pattern_refs", r.attack_pattern_refs},
             {"source", r.source}};
    if (r.parent_id) out["parent_id"] = *r.parent_id;
    put_extras(out, r.extra);
    return out;
}

json to_json(const AttackPatternRecord& r) {
    json out{{"id", r.id}, {"name", r.name}, {"weakness_refs", r.weakness_refs}};
    put_extras(out, r.extra);
    return out;
}

json to_json(const WeaknessRecord& r) {
    json out{{"id", r.id}, {"name", r.name}, {"vulnerability_refs", r.vulnerability_refs}};
    put_extras(out, r.extra);
    return out;
}

json to_json(const VulnerabilityRecord& r) {
    json out{{"id", r.id}, {"name", r.name}, {"asset_types", r.asset_types}};
    put_extras(out, r.extra);
    return out;
}

json records_json(const KnowledgeBase& kb, CatalogKind kind) {
    json out = json::array();
    switch (kind) {
    case CatalogKind::Techniques:
        for (const auto& [id, r] : kb.techniques()) out.push_back(to_json(r));
        break;
    case CatalogKind::AttackPatterns:
        for (const auto& [id, r] : kb.attack_patterns()) out.push_back(to_json(r));
        break;
    case CatalogKind::Weaknesses:
        for (const auto& [id, r] : kb.weaknesses()) out.push_back(to_json(r));
        break;
    case CatalogKind::Vulnerabilities:
        for (const auto& [id, r] : kb.vulnerabilities()) out.push_back(to_json(r));
        break;
    case CatalogKind::StixBundle:
        throw Error("stix bundles are ingest-only");
    }
    return out;
}

std::size_t line_of(std::string_view text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

json parse_document(std::string_view document) {
    try {
        return json::parse(document.begin(), document.end());
    } catch (const json::parse_error& e) {
        // e.byte is 1-based and points one past the offending character.
        const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
        throw ParseError("line " + std::to_string(line_of(document, byte)), "malformed JSON");
    }
}

} // namespace detail

// --- operations -------------------------------------------------------------

namespace {

template <typename Record, typename Parser>
void ingest_records(KnowledgeBase& kb, const json& records, Parser parse) {
    std::set<std::string, std::less<>> seen;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& obj = records[i];
        if (!obj.is_object()) throw ParseError("records[" + std::to_string(i) + "]", "expected an object");
        Record record = parse(obj, i);
        if (!seen.insert(record.id).second) {
            throw ConflictError(record.id, "duplicate id '" + record.id + "' in catalog");
        }
        kb.add(std::move(record));
    }
}

} // namespace

KnowledgeBase ingest_catalog_json(const json& doc, CatalogKind kind, std::string_view source_name) {
    if (kind == CatalogKind::StixBundle) return detail::ingest_stix(doc, source_name, json_hash(doc));

    if (!doc.is_object()) throw ParseError("document", "expected a JSON object");
    auto version = doc.find("schema_version");
    if (version == doc.end() || !version->is_string()) {
        throw ParseError("schema_version", "missing or not a string");
    }
    if (*version != kCatalogSchemaVersion) {
        throw VersionError("unsupported catalog schema_version '" + version->get<std::string>() + "'");
    }
    auto declared = doc.find("kind");
    if (declared == doc.end() || !declared->is_string()) throw ParseError("kind", "missing or not a string");
    if (*declared != to_string(kind)) {
        throw ParseError("kind", "document declares kind '" + declared->get<std::string>() +
                                     "' but '" + std::string(to_string(kind)) + "' was requested");
    }
    auto records = doc.find("records");
    if (records == doc.end() || !records->is_array()) throw ParseError("records", "missing or not an array");

    KnowledgeBase kb;
    switch (kind) {
    case CatalogKind::Techniques:
        ingest_records<TechniqueRecord>(kb, *records, detail::parse_technique);
        break;
    case CatalogKind::AttackPatterns:
        ingest_records<AttackPatternRecord>(kb, *records, detail::parse_attack_pattern);
        break;
    case CatalogKind::Weaknesses:
        ingest_records<WeaknessRecord>(kb, *records, detail::parse_weakness);
        break;
    case CatalogKind::Vulnerabilities:
        ingest_records<VulnerabilityRecord>(kb, *records, detail::parse_vulnerability);
        break;
    case CatalogKind::StixBundle:
        break;
    }
    kb.add_provenance({std::string(source_name), json_hash(doc), utc_now_iso8601()});
    return kb;
}

KnowledgeBase ingest_catalog(std::string_view document, CatalogKind kind, std::string_view source_name) {
    return ingest_catalog_json(detail::parse_document(document), kind, source_name);
}

KnowledgeBase merge_catalogs(const KnowledgeBase& a, const KnowledgeBase& b) {
    KnowledgeBase out = a;
    for (const auto& [id, r] : b.techniques()) out.add(r);
    for (const auto& [id, r] : b.attack_patterns()) out.add(r);
    for (const auto& [id, r] : b.weaknesses()) out.add(r);
    for (const auto& [id, r] : b.vulnerabilities()) out.add(r);
    for (const auto& p : b.provenance()) out.add_provenance(p);
    return out;
}

std::vector<Chain> resolve_chain(const KnowledgeBase& kb, std::string_view technique_id) {
    const TechniqueRecord* technique = kb.find_technique(technique_id);
    if (technique == nullptr) throw NotFoundError("unknown technique '" + std::string(technique_id) + "'");

    auto sorted = [](std::vector<std::string> ids) {
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        return ids;
    };

    std::vector<Chain> chains;
    Chain prefix{{LinkKind::Technique, technique->id, true}};

    auto emit = [&](const Chain& chain) { chains.push_back(chain); };

    const auto patterns = sorted(technique->attack_pattern_refs);
    if (patterns.empty()) emit(prefix);
    for (const auto& pid : patterns) {
        const auto* pattern = kb.find_attack_pattern(pid);
        prefix.push_back({LinkKind::AttackPattern, pid, pattern != nullptr});
        const auto weaknesses = pattern ? sorted(pattern->weakness_refs) : std::vector<std::string>{};
        if (weaknesses.empty()) emit(prefix);
        for (const auto& wid : weaknesses) {
            const auto* weakness = kb.find_weakness(wid);
            prefix.push_back({LinkKind::Weakness, wid, weakness != nullptr});
            const auto vulns = weakness ? sorted(weakness->vulnerability_refs) : std::vector<std::string>{};
            if (vulns.empty()) emit(prefix);
            for (const auto& vid : vulns) {
                const auto* vuln = kb.find_vulnerability(vid);
                prefix.push_back({LinkKind::Vulnerability, vid, vuln != nullptr});
                const auto assets = vuln ? sorted(vuln->asset_types) : std::vector<std::string>{};
                if (assets.empty()) emit(prefix);
                for (const auto& tag : assets) {
                    prefix.push_back({LinkKind::AssetType, tag, true});
                    emit(prefix);
                    prefix.pop_back();
                }
                prefix.pop_back();
            }
            prefix.pop_back();
        }
        prefix.pop_back();
    }
    return chains;
}

std::string Finding::message() const {
    return source_kind + " '" + source_id + "' " + field + " references missing '" + target_id + "'";
}

ValidationReport validate_catalog(const KnowledgeBase& kb) {
    ValidationReport report;
    auto check = [&](bool resolves, std::string_view kind, const std::string& id, std::string_view field,
                     const std::string& target) {
        if (!resolves) report.findings.push_back({std::string(kind), id, std::string(field), target});
    };
    for (const auto& [id, t] : kb.techniques()) {
        if (t.parent_id) check(kb.find_technique(*t.parent_id) != nullptr, "technique", id, "parent_id", *t.parent_id);
        for (const auto& ref : t.attack_pattern_refs)
            check(kb.find_attack_pattern(ref) != nullptr, "technique", id, "attack_pattern_refs", ref);
    }
    for (const auto& [id, p] : kb.attack_patterns()) {
        for (const auto& ref : p.weakness_refs)
            check(kb.find_weakness(ref) != nullptr, "attack_pattern", id, "weakness_refs", ref);
    }
    for (const auto& [id, w] : kb.weaknesses()) {
        for (const auto& ref : w.vulnerability_refs)
            check(kb.find_vulnerability(ref) != nullptr, "weakness", id, "vulnerability_refs", ref);
    }
    std::sort(report.findings.begin(), report.findings.end());
    report.findings.erase(std::unique(report.findings.begin(), report.findings.end()), report.findings.end());
    return report;
}

std::string serialize_catalog(const KnowledgeBase& kb, CatalogKind kind) {
    json doc{{"schema_version", kCatalogSchemaVersion},
             {"kind", to_string(kind)},
             {"records", detail::records_json(kb, kind)}};
    return doc.dump(2);
}

json to_bundle(const KnowledgeBase& kb) {
    json catalogs = json::array();
    for (auto kind : {CatalogKind::Techniques, CatalogKind::AttackPatterns, CatalogKind::Weaknesses,
                      CatalogKind::Vulnerabilities}) {
        catalogs.push_back({{"schema_version", kCatalogSchemaVersion},
                            {"kind", to_string(kind)},
                            {"records", detail::records_json(kb, kind)}});
    }
    json provenance = json::array();
    for (const auto& p : kb.provenance()) {
        provenance.push_back({{"source", p.source}, {"content_hash", p.content_hash}, {"ingested_at", p.ingested_at}});
    }
    return {{"schema_version", kCatalogSchemaVersion}, {"catalogs", catalogs}, {"provenance", provenance}};
}

KnowledgeBase from_bundle(const json& bundle) {
    if (!bundle.is_object() || !bundle.contains("catalogs") || !bundle["catalogs"].is_array()) {
        throw ParseError("catalogs", "knowledge-base bundle must hold a catalogs array");
    }
    if (bundle.value("schema_version", std::string{}) != kCatalogSchemaVersion) {
        throw VersionError("unsupported knowledge-base bundle schema_version");
    }
    KnowledgeBase kb;
    for (const auto& doc : bundle["catalogs"]) {
        const auto kind = parse_catalog_kind(doc.value("kind", std::string{}));
        kb = merge_catalogs(kb, ingest_catalog_json(doc, kind, "bundle"));
    }
    // Restore recorded provenance instead of the synthetic "bundle" entries.
    KnowledgeBase restored;
    for (const auto& [id, r] : kb.techniques()) restored.add(r);
    for (const auto& [id, r] : kb.attack_patterns()) restored.add(r);
    for (const auto& [id, r] : kb.weaknesses()) restored.add(r);
    for (const auto& [id, r] : kb.vulnerabilities()) restored.add(r);
    for (const auto& p : bundle.value("provenance", json::array())) {
        restored.add_provenance({p.value("source", ""), p.value("content_hash", ""), p.value("ingested_at", "")});
    }
    return restored;
}

} // namespace tibsa::kb
