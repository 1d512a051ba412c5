// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors

#include "tibsa/gateway/workspace.hpp"

#include <fstream>
#include <sstream>

#include "tibsa/error.hpp"

namespace tibsa::gateway {

using nlohmann::json;
namespace eff = effectiveness;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

json kb_summary(const kb::KnowledgeBase& kb) {
    json findings = json::array();
    for (const auto& f : kb::validate_catalog(kb).findings) findings.push_back(f.message());
    return {{"kb_hash", kb.content_hash()},
            {"techniques", kb.techniques().size()},
            {"attack_patterns", kb.attack_patterns().size()},
            {"weaknesses", kb.weaknesses().size()},
            {"vulnerabilities", kb.vulnerabilities().size()},
            {"findings", findings}};
}

std::vector<CatalogInput> catalogs_from_json(const json& list) {
    std::vector<CatalogInput> out;
    if (!list.is_array()) throw ParseError("catalogs", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
        const auto& c = list[i];
        const std::string where = "catalogs[" + std::to_string(i) + "]";
        if (!c.is_object() || !c.contains("kind") || !c["kind"].is_string()) throw ParseError(where + ".kind", "missing");
        if (!c.contains("document")) throw ParseError(where + ".document", "missing");
        CatalogInput input;
        input.kind = kb::parse_catalog_kind(c["kind"].get<std::string>());
        input.document = c["document"].is_string() ? c["document"].get<std::string>() : c["document"].dump();
        input.source = c.value("source", where);
        out.push_back(std::move(input));
    }
    return out;
}

const json& list_body(const json& body, const char* key) {
    if (body.is_array()) return body;
    if (body.is_object() && body.contains(key) && body[key].is_array()) return body[key];
    throw ParseError(key, "expected an array or an object with a '" + std::string(key) + "' array");
}

json evaluation_rows(const std::vector<eff::ControlEvaluation>& evaluations) {
    json rows = json::array();
    for (std::size_t i = 0; i < evaluations.size(); ++i) {
        const auto& e = evaluations[i];
        rows.push_back({{"rank", i + 1},
                        {"control_id", e.control_id},
                        {"benefit", e.benefit},
                        {"cost", e.cost},
                        {"ratio", e.ratio},
                        {"display_ratio", e.display_ratio()}});
    }
    return rows;
}

json ttp_rows(const std::vector<scoring::AggregatedScore>& aggregates) {
    json rows = json::array();
    for (std::size_t i = 0; i < aggregates.size(); ++i) {
        auto row = scoring::to_json(aggregates[i]);
        row["rank"] = i + 1;
        rows.push_back(std::move(row));
    }
    return rows;
}

void require_evaluated(const registry::Assessment& a) {
    if (a.status != registry::Status::Evaluated && a.status != registry::Status::Reported) {
        throw StatusError("assessment " + a.id + " is " + std::string(registry::to_string(a.status)) +
                          "; run evaluate first");
    }
}

} // namespace

CatalogInput read_catalog(kb::CatalogKind kind, const std::string& path) {
    return {kind, read_file(path), path};
}

CatalogInput read_catalog(std::string_view spec) {
    const auto eq = spec.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 == spec.size()) {
        throw ParseError("--catalog", "expected KIND=PATH, got '" + std::string(spec) + "'");
    }
    return read_catalog(kb::parse_catalog_kind(spec.substr(0, eq)), std::string(spec.substr(eq + 1)));
}

json read_json_file(const std::string& path) {
    const std::string text = read_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(path, e.what());
    }
}

Workspace::Workspace(GatewayConfig config, registry::Clock clock)
    : config_(std::move(config)), clock_(std::move(clock)), rubric_(scoring::default_rubric()),
      matrix_(eff::ScoreMatrix::defaults()) {
    config_.validate();
    if (!config_.rubric_path.empty()) rubric_ = scoring::parse_rubric(read_json_file(config_.rubric_path));
    if (!config_.matrix_config_path.empty()) {
        matrix_ = eff::ScoreMatrix::from_config(read_json_file(config_.matrix_config_path));
    }
    if (!config_.register_path.empty()) register_ = registry::load_register(config_.register_path, true);
}

kb::KnowledgeBase Workspace::build_kb(std::span<const CatalogInput> inputs) const {
    kb::KnowledgeBase merged;
    for (const auto& input : inputs) {
        merged = kb::merge_catalogs(merged, kb::ingest_catalog(input.document, input.kind, input.source));
    }
    return merged;
}

json Workspace::ingest(std::span<const CatalogInput> inputs, bool store) {
    const auto kb = build_kb(inputs);
    auto summary = kb_summary(kb);
    summary["stored"] = false;
    if (store) {
        std::unique_lock lock(mutex_);
        register_.store_kb(kb);
        register_.record("gateway", "ingest", "", kb.content_hash(), clock_());
        persist_locked();
        summary["stored"] = true;
    }
    return summary;
}

json Workspace::build_graph(std::span<const CatalogInput> inputs, const json& cti, const json& landscape) const {
    return graph::to_node_link(
        graph::build_graph(build_kb(inputs), graph::parse_cti(cti), graph::parse_landscape(landscape)));
}

json Workspace::classify(std::span<const CatalogInput> inputs, const json& cti_doc, const json& landscape_doc) const {
    const auto kb = build_kb(inputs);
    const auto cti = graph::parse_cti(cti_doc);
    const auto landscape = graph::parse_landscape(landscape_doc);
    const auto g = graph::build_graph(kb, cti, landscape);
    json out = json::array();
    for (const auto& c : graph::classify_ttps(g, kb, cti, landscape, {config_.probable_threshold})) {
        out.push_back(graph::to_json(c));
    }
    return {{"classifications", out}};
}

json Workspace::create(const json& request, std::span<const CatalogInput> catalogs, const std::string& actor) {
    if (!request.is_object()) throw ParseError("request", "expected a JSON object");
    if (!request.contains("id") || !request["id"].is_string()) throw ParseError("id", "missing or not a string");
    for (const char* key : {"cti", "landscape"}) {
        if (!request.contains(key)) throw ParseError(key, "missing");
    }
    const std::string id = request["id"].get<std::string>();
    const registry::Mode mode =
        request.contains("mode") ? registry::parse_mode(request["mode"].get<std::string>()) : config_.mode;

    std::vector<CatalogInput> inputs(catalogs.begin(), catalogs.end());
    if (request.contains("catalogs")) {
        auto extra = catalogs_from_json(request["catalogs"]);
        inputs.insert(inputs.end(), extra.begin(), extra.end());
    }
    kb::KnowledgeBase kb = build_kb(inputs);
    if (request.contains("kb_hash")) {
        const std::string hash = request["kb_hash"].get<std::string>();
        std::shared_lock lock(mutex_);
        auto it = register_.kb_snapshots.find(hash);
        if (it == register_.kb_snapshots.end()) throw NotFoundError("no knowledge-base snapshot " + hash);
        kb = kb::merge_catalogs(kb::from_bundle(it->second), kb);
    }
    const auto rubric = request.contains("rubric") ? scoring::parse_rubric(request["rubric"]) : rubric_;

    registry::CreateOptions options;
    options.settings = config_.settings();
    options.matrix = matrix_;
    options.clock = clock_;
    auto a = registry::create_assessment(id, mode, kb, graph::parse_cti(request["cti"]),
                                         graph::parse_landscape(request["landscape"]), rubric, options);

    auto lock = writer_lock(id);
    std::scoped_lock guard(*lock);
    {
        std::unique_lock reg(mutex_);
        if (register_.assessments.contains(id)) throw ConflictError(id, "assessment '" + id + "' already exists");
        register_.store_kb(kb);
        register_.put(a, actor, "create");
        persist_locked();
    }
    json assets = json::array();
    for (const auto& asset : a.impacted_assets) {
        assets.push_back({{"asset_id", asset.asset_id},
                          {"class", graph::to_string(asset.cls)},
                          {"source", registry::to_string(asset.source)}});
    }
    return {{"id", a.id},
            {"mode", registry::to_string(a.mode)},
            {"status", registry::to_string(a.status)},
            {"assume_breach", a.assume_breach},
            {"scoped_ttps", a.scoped_ttps},
            {"impacted_assets", assets},
            {"content_hash", registry::content_hash(a)}};
}

json Workspace::list() const {
    std::shared_lock lock(mutex_);
    json out = json::array();
    for (const auto& [id, a] : register_.assessments) {
        out.push_back({{"id", id},
                       {"mode", registry::to_string(a.mode)},
                       {"status", registry::to_string(a.status)},
                       {"updated_at", a.updated_at},
                       {"content_hash", registry::content_hash(a)}});
    }
    return {{"assessments", out}};
}

registry::Assessment Workspace::copy_of(std::string_view id) const {
    std::shared_lock lock(mutex_);
    return register_.get(id);
}

registry::RiskRegister Workspace::snapshot() const {
    std::shared_lock lock(mutex_);
    return register_;
}

json Workspace::get(std::string_view id) const {
    const auto a = copy_of(id);
    auto doc = registry::to_json(a);
    doc["content_hash"] = registry::content_hash(a);
    return doc;
}

std::string Workspace::content_hash(std::string_view id) const { return registry::content_hash(copy_of(id)); }

json Workspace::classifications(std::string_view id) const {
    const auto a = copy_of(id);
    json list = json::array();
    json lanes = {{"probable", json::array()}, {"plausible", json::array()}, {"possible", json::array()},
                  {"excluded", json::array()}};
    for (const auto& c : a.classifications) {
        list.push_back(graph::to_json(c));
        lanes[std::string(graph::to_string(c.cls))].push_back(c.ttp_id);
    }
    return {{"assessment_id", a.id}, {"classifications", list}, {"lanes", lanes}, {"scoped_ttps", a.scoped_ttps}};
}

json Workspace::graph(std::string_view id) const { return graph::to_node_link(copy_of(id).graph); }

json Workspace::aggregate(std::string_view id) const {
    const auto a = copy_of(id);
    std::map<std::string, std::vector<scoring::AssessorScore>> by_ttp;
    for (const auto& s : a.scores) by_ttp[s.ttp_id].push_back(s);
    std::vector<scoring::AggregatedScore> out;
    std::vector<std::string> unscored;
    for (const auto& ttp : a.scoped_ttps) {
        auto it = by_ttp.find(ttp);
        if (it == by_ttp.end()) {
            unscored.push_back(ttp);
            continue;
        }
        out.push_back(scoring::aggregate(a.rubric, it->second, {a.settings.divergence_threshold}));
    }
    return {{"assessment_id", a.id}, {"ranking", ttp_rows(scoring::rank_ttps(std::move(out)))}, {"unscored", unscored}};
}

json Workspace::ttp_ranking(std::string_view id) const {
    const auto a = copy_of(id);
    require_evaluated(a);
    return {{"assessment_id", a.id}, {"ranking", ttp_rows(a.aggregates)}};
}

json Workspace::control_ranking(std::string_view id) const {
    const auto a = copy_of(id);
    require_evaluated(a);
    return {{"assessment_id", a.id}, {"ranking", evaluation_rows(a.evaluations)}};
}

json Workspace::whatif(std::string_view id, const json& body) const {
    const auto a = copy_of(id);
    const std::string before = registry::content_hash(a);
    std::vector<registry::Change> changes;
    for (const auto& c : list_body(body, "changes")) changes.push_back(registry::parse_change(c, a.matrix));
    const auto result = registry::whatif(a, changes);
    auto out = registry::to_json(result);
    out["evaluations"] = evaluation_rows(result.evaluations);
    out["assessment_id"] = a.id;
    out["content_hash"] = before;
    return out;
}

std::shared_ptr<std::mutex> Workspace::writer_lock(const std::string& id) {
    std::scoped_lock guard(locks_mutex_);
    auto& slot = writer_locks_[id];
    if (!slot) slot = std::make_shared<std::mutex>();
    return slot;
}

void Workspace::persist_locked() const {
    if (!config_.register_path.empty()) registry::save_register(register_, config_.register_path);
}

void Workspace::commit(registry::Assessment a, const std::string& actor, const std::string& action) {
    std::unique_lock lock(mutex_);
    register_.put(std::move(a), actor, action);
    persist_locked();
}

json Workspace::submit_scores(std::string_view id, const json& body, const std::string& actor) {
    std::vector<scoring::AssessorScore> scores;
    for (const auto& s : list_body(body, "scores")) scores.push_back(scoring::parse_score(s));
    auto lock = writer_lock(std::string(id));
    std::scoped_lock guard(*lock);
    auto a = copy_of(id);
    registry::submit_scores(a, scores, clock_);
    const json out = {{"id", a.id},
                      {"status", registry::to_string(a.status)},
                      {"accepted", scores.size()},
                      {"content_hash", registry::content_hash(a)}};
    commit(std::move(a), actor, "submit_scores");
    return out;
}

json Workspace::set_controls(std::string_view id, const json& inventory, const std::string& actor) {
    auto lock = writer_lock(std::string(id));
    std::scoped_lock guard(*lock);
    auto a = copy_of(id);
    registry::set_controls(a, eff::parse_inventory(inventory, a.matrix), clock_);
    const json out = {{"id", a.id},
                      {"status", registry::to_string(a.status)},
                      {"controls", a.controls.size()},
                      {"entries", a.entries.size()},
                      {"content_hash", registry::content_hash(a)}};
    commit(std::move(a), actor, "set_controls");
    return out;
}

json Workspace::evaluate(std::string_view id, const std::optional<json>& inventory, const std::string& actor) {
    auto lock = writer_lock(std::string(id));
    std::scoped_lock guard(*lock);
    auto a = copy_of(id);
    if (inventory) registry::set_controls(a, eff::parse_inventory(*inventory, a.matrix), clock_);
    registry::run_pipeline(a, clock_);
    const json out = {{"assessment_id", a.id},
                      {"status", registry::to_string(a.status)},
                      {"ranking", evaluation_rows(a.evaluations)},
                      {"baseline_path", a.baseline_path ? graph::to_json(*a.baseline_path) : json(nullptr)},
                      {"findings", a.findings},
                      {"content_hash", registry::content_hash(a)}};
    commit(std::move(a), actor, "evaluate");
    return out;
}

json Workspace::report(std::string_view id, const json& body, const std::string& actor) {
    auto lock = writer_lock(std::string(id));
    std::scoped_lock guard(*lock);
    auto a = copy_of(id);
    if (body.is_object() && body.contains("signoff")) {
        if (!body["signoff"].is_string()) throw ParseError("signoff", "expected a string");
        a.signoff = body["signoff"].get<std::string>();
    }
    auto report = registry::generate_report(a, clock_);
    const json out = {{"assessment_id", a.id},
                      {"status", registry::to_string(a.status)},
                      {"report", report.document},
                      {"markup", report.markup},
                      {"content_hash", registry::content_hash(a)}};
    commit(std::move(a), actor, "report");
    return out;
}

} // namespace tibsa::gateway
