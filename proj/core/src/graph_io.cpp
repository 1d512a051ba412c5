// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors

#include "tibsa/causal_graph.hpp"
#include "tibsa/error.hpp"

namespace tibsa::graph {

using nlohmann::json;

namespace {

void check_version(const json& doc, const char* what) {
    if (!doc.is_object()) throw ParseError(what, "expected a JSON object");
    if (doc.contains("schema_version") && doc["schema_version"] != "1") {
        throw VersionError(std::string("unsupported ") + what + " schema_version");
    }
}

std::string get_string(const json& obj, const std::string& where, const char* key, bool required = true) {
    if (!obj.contains(key)) {
        if (required) throw ParseError(where + "." + key, "missing");
        return {};
    }
    if (!obj[key].is_string()) throw ParseError(where + "." + key, "expected a string");
    return obj[key].get<std::string>();
}

std::vector<std::string> get_strings(const json& obj, const std::string& where, const char* key) {
    std::vector<std::string> out;
    if (!obj.contains(key)) return out;
    const auto& list = obj[key];
    if (!list.is_array()) throw ParseError(where + "." + key, "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
        if (!list[i].is_string()) throw ParseError(where + "." + key + "[" + std::to_string(i) + "]", "expected a string");
        out.push_back(list[i].get<std::string>());
    }
    return out;
}

int get_int(const json& obj, const std::string& where, const char* key, int fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer()) throw ParseError(where + "." + key, "expected an integer");
    return obj[key].get<int>();
}

const json& get_array(const json& obj, const char* key) {
    static const json empty = json::array();
    if (!obj.contains(key)) return empty;
    if (!obj[key].is_array()) throw ParseError(key, "expected an array");
    return obj[key];
}

std::string at(const char* list, std::size_t i) { return std::string(list) + "[" + std::to_string(i) + "]"; }

} // namespace

CtiReport parse_cti(const json& doc) {
    check_version(doc, "cti");
    CtiReport cti;
    cti.campaign_id = get_string(doc, "cti", "campaign_id", false);
    cti.actor = get_string(doc, "cti", "actor", false);
    const auto& goals = get_array(doc, "goals");
    for (std::size_t i = 0; i < goals.size(); ++i) {
        cti.goals.push_back({get_string(goals[i], at("goals", i), "id"),
                             get_string(goals[i], at("goals", i), "description", false)});
    }
    const auto& evidence = get_array(doc, "evidence");
    for (std::size_t i = 0; i < evidence.size(); ++i) {
        const auto& e = evidence[i];
        const std::string where = at("evidence", i);
        Evidence ev;
        ev.ttp_id = get_string(e, where, "ttp_id");
        ev.evidence_level = get_int(e, where, "evidence_level", 1);
        ev.confidence = get_int(e, where, "confidence", 3);
        ev.note = get_string(e, where, "note", false);
        ev.leads_to = get_strings(e, where, "leads_to");
        ev.achieves = get_strings(e, where, "achieves");
        cti.evidence.push_back(std::move(ev));
    }
    const auto& hints = get_array(doc, "provided_assets");
    for (std::size_t i = 0; i < hints.size(); ++i) {
        cti.provided_assets.push_back({get_string(hints[i], at("provided_assets", i), "asset_id"),
                                       get_strings(hints[i], at("provided_assets", i), "ttp_ids")});
    }
    cti.adaptations = get_strings(doc, "cti", "adaptations");
    cti.validate();
    return cti;
}

json to_json(const CtiReport& cti) {
    json goals = json::array();
    for (const auto& g : cti.goals) goals.push_back({{"id", g.id}, {"description", g.description}});
    json evidence = json::array();
    for (const auto& e : cti.evidence) {
        evidence.push_back({{"ttp_id", e.ttp_id},
                            {"evidence_level", e.evidence_level},
                            {"confidence", e.confidence},
                            {"note", e.note},
                            {"leads_to", e.leads_to},
                            {"achieves", e.achieves}});
    }
    json hints = json::array();
    for (const auto& h : cti.provided_assets) hints.push_back({{"asset_id", h.asset_id}, {"ttp_ids", h.ttp_ids}});
    return {{"schema_version", "1"}, {"campaign_id", cti.campaign_id}, {"actor", cti.actor},
            {"goals", goals},        {"evidence", evidence},          {"provided_assets", hints},
            {"adaptations", cti.adaptations}};
}

LandscapeInventory parse_landscape(const json& doc) {
    check_version(doc, "landscape");
    LandscapeInventory inv;
    const auto& assets = get_array(doc, "assets");
    for (std::size_t i = 0; i < assets.size(); ++i) {
        const std::string where = at("assets", i);
        Asset a;
        a.id = get_string(assets[i], where, "id");
        a.name = get_string(assets[i], where, "name", false);
        a.platforms = get_strings(assets[i], where, "platforms");
        const std::string zone = get_string(assets[i], where, "zone", false);
        if (!zone.empty()) {
            try {
                a.zone = parse_zone(zone);
            } catch (const ParseError&) {
                throw ParseError(where + ".zone", "unknown zone '" + zone + "'");
            }
        }
        a.tech_stack = get_strings(assets[i], where, "tech_stack");
        inv.assets.push_back(std::move(a));
    }
    const auto& exclusions = get_array(doc, "exclusions");
    for (std::size_t i = 0; i < exclusions.size(); ++i) {
        inv.exclusions.push_back({get_string(exclusions[i], at("exclusions", i), "ttp_id"),
                                  get_string(exclusions[i], at("exclusions", i), "reason")});
    }
    inv.validate();
    return inv;
}

json to_json(const LandscapeInventory& landscape) {
    json assets = json::array();
    for (const auto& a : landscape.assets) {
        assets.push_back({{"id", a.id},
                          {"name", a.name},
                          {"platforms", a.platforms},
                          {"zone", to_string(a.zone)},
                          {"tech_stack", a.tech_stack}});
    }
    json exclusions = json::array();
    for (const auto& e : landscape.exclusions) exclusions.push_back({{"ttp_id", e.ttp_id}, {"reason", e.reason}});
    return {{"schema_version", "1"}, {"assets", assets}, {"exclusions", exclusions}};
}

json to_json(const TtpClassification& c) {
    return {{"ttp_id", c.ttp_id}, {"class", to_string(c.cls)}, {"sphere", to_string(c.sphere)}, {"rationale", c.rationale}};
}

TtpClassification parse_classification(const json& doc) {
    TtpClassification c;
    c.ttp_id = doc.at("ttp_id").get<std::string>();
    c.cls = parse_ttp_class(doc.at("class").get<std::string>());
    c.sphere = parse_sphere(doc.at("sphere").get<std::string>());
    c.rationale = doc.at("rationale").get<std::vector<std::string>>();
    return c;
}

json to_json(const AttackPath& path) {
    return {{"nodes", path.nodes},
            {"propensity", path.propensity},
            {"detect_coverage", path.detect_coverage},
            {"viable", path.viable}};
}

AttackPath parse_path(const json& doc) {
    AttackPath p;
    p.nodes = doc.at("nodes").get<std::vector<std::string>>();
    p.propensity = doc.at("propensity").get<int>();
    p.detect_coverage = doc.at("detect_coverage").get<int>();
    p.viable = doc.at("viable").get<bool>();
    return p;
}

json to_json(const ReplanResult& r) {
    return {{"old_path", r.old_path ? to_json(*r.old_path) : json(nullptr)},
            {"new_path", r.new_path ? to_json(*r.new_path) : json(nullptr)},
            {"paradox", r.paradox},
            {"old_impact", r.old_impact},
            {"new_impact", r.new_impact},
            {"deltas",
             {{"propensity", r.deltas.propensity},
              {"detect_coverage", r.deltas.detect_coverage},
              {"impact", r.deltas.impact}}}};
}

ReplanResult parse_replan(const json& doc) {
    ReplanResult r;
    if (!doc.at("old_path").is_null()) r.old_path = parse_path(doc["old_path"]);
    if (!doc.at("new_path").is_null()) r.new_path = parse_path(doc["new_path"]);
    r.paradox = doc.at("paradox").get<bool>();
    r.old_impact = doc.at("old_impact").get<double>();
    r.new_impact = doc.at("new_impact").get<double>();
    const auto& d = doc.at("deltas");
    r.deltas = {d.at("propensity").get<int>(), d.at("detect_coverage").get<int>(), d.at("impact").get<double>()};
    return r;
}

} // namespace tibsa::graph
