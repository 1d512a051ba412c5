// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors

#include "tibsa/assessment.hpp"
#include "tibsa/error.hpp"

namespace tibsa::registry {

using nlohmann::json;
namespace eff = effectiveness;

namespace {

json evaluation_json(const eff::ControlEvaluation& e) {
    return {{"control_id", e.control_id},
            {"benefit", e.benefit},
            {"cost", e.cost},
            {"ratio", e.ratio},
            {"display_ratio", e.display_ratio()}};
}

eff::ControlEvaluation parse_evaluation(const json& doc) {
    return {doc.at("control_id").get<std::string>(), doc.at("benefit").get<int>(), doc.at("cost").get<double>(),
            doc.at("ratio").get<double>()};
}

json coverage_json(const eff::CoverageMatrix& m) {
    json rows = json::array();
    for (const auto& row : m.cells) {
        json cells = json::array();
        for (const auto& cell : row) cells.push_back(eff::render_cell(cell));
        rows.push_back(std::move(cells));
    }
    return {{"control_ids", m.control_ids}, {"ttp_ids", m.ttp_ids}, {"cells", rows}};
}

eff::CoverageMatrix parse_coverage(const json& doc) {
    eff::CoverageMatrix m;
    m.control_ids = doc.at("control_ids").get<std::vector<std::string>>();
    m.ttp_ids = doc.at("ttp_ids").get<std::vector<std::string>>();
    for (const auto& row : doc.at("cells")) {
        std::vector<eff::Cell> cells;
        for (const auto& cell : row) cells.push_back(eff::parse_cell(cell.get<std::string>()));
        m.cells.push_back(std::move(cells));
    }
    return m;
}

} // namespace

json to_json(const Assessment& a) {
    json assets = json::array();
    for (const auto& asset : a.impacted_assets) {
        assets.push_back(
            {{"asset_id", asset.asset_id}, {"class", graph::to_string(asset.cls)}, {"source", to_string(asset.source)}});
    }
    json classifications = json::array();
    for (const auto& c : a.classifications) classifications.push_back(graph::to_json(c));
    json scores = json::array();
    for (const auto& s : a.scores) scores.push_back(scoring::to_json(s));
    json aggregates = json::array();
    for (const auto& agg : a.aggregates) aggregates.push_back(scoring::to_json(agg));
    json evaluations = json::array();
    for (const auto& e : a.evaluations) evaluations.push_back(evaluation_json(e));
    json replans = json::array();
    for (const auto& r : a.replans) {
        replans.push_back({{"id", r.id}, {"description", r.description}, {"result", graph::to_json(r.result)}});
    }
    json recommendations = json::array();
    for (const auto& r : a.recommendations) {
        recommendations.push_back({{"id", r.id}, {"text", r.text}, {"refs", r.refs}});
    }

    return {
        {"id", a.id},
        {"mode", to_string(a.mode)},
        {"status", to_string(a.status)},
        {"assume_breach", a.assume_breach},
        {"created_at", a.created_at},
        {"updated_at", a.updated_at},
        {"kb_hash", a.kb_hash},
        {"cti", graph::to_json(a.cti)},
        {"landscape", graph::to_json(a.landscape)},
        {"rubric", scoring::to_json(a.rubric)},
        {"matrix", a.matrix.to_json()},
        {"settings",
         {{"probable_threshold", a.settings.probable_threshold},
          {"divergence_threshold", a.settings.divergence_threshold},
          {"max_depth", a.settings.max_depth}}},
        {"graph", graph::to_node_link(a.graph)},
        {"impacted_assets", assets},
        {"classifications", classifications},
        {"scoped_ttps", a.scoped_ttps},
        {"scores", scores},
        {"aggregates", aggregates},
        {"controls", eff::to_json(eff::ControlInventory{a.controls, a.entries}, a.matrix)},
        {"coverage", coverage_json(a.coverage)},
        {"evaluations", evaluations},
        {"baseline_path", a.baseline_path ? graph::to_json(*a.baseline_path) : json(nullptr)},
        {"replans", replans},
        {"findings", a.findings},
        {"recommendations", recommendations},
        {"signoff", a.signoff},
        {"report", a.report ? *a.report : json(nullptr)},
    };
}

Assessment parse_assessment(const json& doc) {
    if (!doc.is_object()) throw ParseError("assessment", "expected a JSON object");
    try {
        Assessment a;
        a.id = doc.at("id").get<std::string>();
        a.mode = parse_mode(doc.at("mode").get<std::string>());
        a.status = parse_status(doc.at("status").get<std::string>());
        a.assume_breach = doc.at("assume_breach").get<bool>();
        a.created_at = doc.at("created_at").get<std::string>();
        a.updated_at = doc.at("updated_at").get<std::string>();
        a.kb_hash = doc.at("kb_hash").get<std::string>();
        a.cti = graph::parse_cti(doc.at("cti"));
        a.landscape = graph::parse_landscape(doc.at("landscape"));
        a.rubric = scoring::parse_rubric(doc.at("rubric"));
        a.matrix = eff::ScoreMatrix::from_config(doc.at("matrix"));
        const auto& s = doc.at("settings");
        a.settings = {s.at("probable_threshold").get<int>(), s.at("divergence_threshold").get<int>(),
                      s.at("max_depth").get<int>()};
        a.graph = graph::from_node_link(doc.at("graph"));
        for (const auto& asset : doc.at("impacted_assets")) {
            a.impacted_assets.push_back({asset.at("asset_id").get<std::string>(),
                                         graph::parse_ttp_class(asset.at("class").get<std::string>()),
                                         parse_asset_source(asset.at("source").get<std::string>())});
        }
        for (const auto& c : doc.at("classifications")) a.classifications.push_back(graph::parse_classification(c));
        a.scoped_ttps = doc.at("scoped_ttps").get<std::vector<std::string>>();
        for (const auto& sc : doc.at("scores")) a.scores.push_back(scoring::parse_score(sc));
        for (const auto& agg : doc.at("aggregates")) a.aggregates.push_back(scoring::parse_aggregate(agg));
        auto inventory = eff::parse_inventory(doc.at("controls"), a.matrix);
        a.controls = std::move(inventory.controls);
        a.entries = std::move(inventory.entries);
        a.coverage = parse_coverage(doc.at("coverage"));
        for (const auto& e : doc.at("evaluations")) a.evaluations.push_back(parse_evaluation(e));
        if (!doc.at("baseline_path").is_null()) a.baseline_path = graph::parse_path(doc["baseline_path"]);
        for (const auto& r : doc.at("replans")) {
            a.replans.push_back({r.at("id").get<std::string>(), r.at("description").get<std::string>(),
                                 graph::parse_replan(r.at("result"))});
        }
        a.findings = doc.at("findings").get<std::vector<std::string>>();
        for (const auto& r : doc.at("recommendations")) {
            a.recommendations.push_back({r.at("id").get<std::string>(), r.at("text").get<std::string>(),
                                         r.at("refs").get<std::vector<std::string>>()});
        }
        a.signoff = doc.at("signoff").get<std::string>();
        if (!doc.at("report").is_null()) a.report = doc["report"];
        return a;
    } catch (const json::exception& e) {
        throw ParseError("assessment", e.what());
    }
}

} // namespace tibsa::registry
