// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors
//
// STIX 2.x bundle -> TechniqueRecord conversion. Only the fields that
// TechniqueRecord carries are mapped; every other STIX object type except
// subtechnique-of relationships is ignored.

#include <map>
#include <set>

#include "tibsa/error.hpp"
#include "tibsa/hash.hpp"
#include "kb_detail.hpp"

namespace tibsa::kb::detail {

using nlohmann::json;

namespace {

std::string external_id(const json& object, std::string_view source) {
    for (const auto& ref : object.value("external_references", json::array())) {
        if (ref.value("source_name", "") == source && ref.contains("external_id") && ref["external_id"].is_string()) {
            return ref["external_id"].get<std::string>();
        }
    }
    return {};
}

std::vector<std::string> external_ids(const json& object, std::string_view source) {
    std::vector<std::string> out;
    for (const auto& ref : object.value("external_references", json::array())) {
        if (ref.value("source_name", "") == source && ref.contains("external_id") && ref["external_id"].is_string()) {
            out.push_back(ref["external_id"].get<std::string>());
        }
    }
    return out;
}

} // namespace

KnowledgeBase ingest_stix(const json& bundle, std::string_view source_name, const std::string& content_hash) {
    if (!bundle.is_object() || bundle.value("type", "") != "bundle") {
        throw ParseError("type", "expected a STIX bundle object");
    }
    auto objects = bundle.find("objects");
    if (objects == bundle.end() || !objects->is_array()) throw ParseError("objects", "missing or not an array");

    std::map<std::string, std::string> stix_to_attack; // STIX object id -> ATT&CK id
    std::map<std::string, std::string> parent_of;      // child STIX id -> parent STIX id

    for (std::size_t i = 0; i < objects->size(); ++i) {
        const auto& object = (*objects)[i];
        if (!object.is_object()) throw ParseError("objects[" + std::to_string(i) + "]", "expected an object");
        const std::string type = object.value("type", "");
        if (type == "relationship" && object.value("relationship_type", "") == "subtechnique-of") {
            parent_of[object.value("source_ref", "")] = object.value("target_ref", "");
        } else if (type == "attack-pattern") {
            const std::string attack_id = external_id(object, "mitre-attack");
            if (!attack_id.empty()) stix_to_attack[object.value("id", "")] = attack_id;
        }
    }

    KnowledgeBase kb;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < objects->size(); ++i) {
        const auto& object = (*objects)[i];
        if (object.value("type", "") != "attack-pattern") continue;
        if (object.value("revoked", false) || object.value("x_mitre_deprecated", false)) continue;
        const std::string stix_id = object.value("id", "");
        auto mapped = stix_to_attack.find(stix_id);
        if (mapped == stix_to_attack.end()) continue;

        TechniqueRecord r;
        r.id = mapped->second;
        r.name = object.value("name", "");
        r.source = "stix";
        for (const auto& phase : object.value("kill_chain_phases", json::array())) {
            const std::string name = phase.value("phase_name", "");
            if (!name.empty()) r.tactic_ids.push_back(name);
        }
        if (r.tactic_ids.empty()) {
            throw ParseError("objects[" + std::to_string(i) + "].kill_chain_phases",
                             "technique '" + r.id + "' has no tactic");
        }
        for (const auto& platform : object.value("x_mitre_platforms", json::array())) {
            if (platform.is_string()) r.platforms.push_back(platform.get<std::string>());
        }
        r.attack_pattern_refs = external_ids(object, "capec");
        if (auto parent = parent_of.find(stix_id); parent != parent_of.end()) {
            if (auto pid = stix_to_attack.find(parent->second); pid != stix_to_attack.end()) r.parent_id = pid->second;
        }
        if (!seen.insert(r.id).second) throw ConflictError(r.id, "duplicate id '" + r.id + "' in STIX bundle");
        kb.add(std::move(r));
    }
    kb.add_provenance({std::string(source_name), content_hash, utc_now_iso8601()});
    return kb;
}

} // namespace tibsa::kb::detail
