// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors

#include "tibsa/register.hpp"

#include <fstream>
#include <sstream>

#include "tibsa/error.hpp"
#include "tibsa/hash.hpp"

namespace tibsa::registry {

using nlohmann::json;

Assessment& RiskRegister::get(std::string_view id) {
    auto it = assessments.find(std::string(id));
    if (it == assessments.end()) throw NotFoundError("unknown assessment '" + std::string(id) + "'");
    return it->second;
}

const Assessment& RiskRegister::get(std::string_view id) const {
    auto it = assessments.find(std::string(id));
    if (it == assessments.end()) throw NotFoundError("unknown assessment '" + std::string(id) + "'");
    return it->second;
}

void RiskRegister::record(std::string actor, std::string action, std::string assessment_id, std::string hash,
                          std::string at) {
    const std::uint64_t seq = audit_log.empty() ? 1 : audit_log.back().seq + 1;
    audit_log.push_back({seq, std::move(at), std::move(actor), std::move(action), std::move(assessment_id),
                         std::move(hash)});
}

void RiskRegister::put(Assessment a, std::string actor, std::string action) {
    const std::string id = a.id;
    const std::string hash = content_hash(a);
    const std::string at = a.updated_at;
    assessments.insert_or_assign(id, std::move(a));
    record(std::move(actor), std::move(action), id, hash, at);
}

void RiskRegister::store_kb(const kb::KnowledgeBase& kb) { kb_snapshots[kb.content_hash()] = kb::to_bundle(kb); }

kb::KnowledgeBase RiskRegister::kb_for(const Assessment& a) const {
    auto it = kb_snapshots.find(a.kb_hash);
    if (it == kb_snapshots.end()) throw NotFoundError("no knowledge-base snapshot " + a.kb_hash);
    return kb::from_bundle(it->second);
}

json to_json(const AuditEntry& e) {
    return {{"seq", e.seq},
            {"at", e.at},
            {"actor", e.actor},
            {"action", e.action},
            {"assessment_id", e.assessment_id},
            {"content_hash", e.content_hash}};
}

namespace {

json payload_json(const RiskRegister& r) {
    json assessments = json::object();
    for (const auto& [id, a] : r.assessments) assessments[id] = to_json(a);
    json log = json::array();
    for (const auto& e : r.audit_log) log.push_back(to_json(e));
    json snapshots = json::object();
    for (const auto& [hash, bundle] : r.kb_snapshots) snapshots[hash] = bundle;
    return {{"assessments", assessments}, {"kb_snapshots", snapshots}, {"audit_log", log}};
}

} // namespace

std::string serialize_register(const RiskRegister& r) {
    const json payload = payload_json(r);
    const json doc = {{"schema_version", kRegisterSchemaVersion}, {"checksum", json_hash(payload)}, {"payload", payload}};
    return doc.dump(2) + "\n";
}

RiskRegister parse_register(std::string_view bytes) {
    json doc;
    try {
        doc = json::parse(bytes);
    } catch (const json::parse_error& e) {
        throw ParseError("register", e.what());
    }
    if (!doc.is_object() || !doc.contains("schema_version")) throw ParseError("schema_version", "missing");
    if (doc["schema_version"] != kRegisterSchemaVersion) {
        throw VersionError("unsupported register schema_version " + doc["schema_version"].dump());
    }
    if (!doc.contains("payload") || !doc.contains("checksum")) throw ParseError("payload", "missing payload or checksum");
    const json& payload = doc["payload"];
    if (doc["checksum"] != json_hash(payload)) throw ParseError("checksum", "register checksum mismatch");

    RiskRegister r;
    try {
        for (auto it = payload.at("assessments").begin(); it != payload.at("assessments").end(); ++it) {
            r.assessments.emplace(it.key(), parse_assessment(it.value()));
        }
        for (auto it = payload.at("kb_snapshots").begin(); it != payload.at("kb_snapshots").end(); ++it) {
            r.kb_snapshots.emplace(it.key(), it.value());
        }
        for (const auto& e : payload.at("audit_log")) {
            r.audit_log.push_back({e.at("seq").get<std::uint64_t>(), e.at("at").get<std::string>(),
                                   e.at("actor").get<std::string>(), e.at("action").get<std::string>(),
                                   e.at("assessment_id").get<std::string>(), e.at("content_hash").get<std::string>()});
        }
    } catch (const json::exception& e) {
        throw ParseError("payload", e.what());
    }
    return r;
}

void save_register(const RiskRegister& r, const std::filesystem::path& destination) {
    const std::string bytes = serialize_register(r);
    std::filesystem::path tmp = destination;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out << bytes;
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, destination, ec);
    if (ec) throw IoError("cannot replace " + destination.string() + ": " + ec.message());
}

RiskRegister load_register(const std::filesystem::path& source, bool missing_ok) {
    std::error_code ec;
    if (!std::filesystem::exists(source, ec)) {
        if (missing_ok) return {};
        throw IoError("register not found: " + source.string());
    }
    std::ifstream in(source, std::ios::binary);
    if (!in) throw IoError("cannot read " + source.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_register(buffer.str());
}

} // namespace tibsa::registry
