// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors

#include <algorithm>
#include <sstream>

#include "tibsa/assessment.hpp"
#include "tibsa/error.hpp"

namespace tibsa::registry {

using nlohmann::json;
namespace eff = effectiveness;

namespace {

std::string eval_ref(const std::string& control_id) { return "eval:" + control_id; }
std::string replan_ref(const std::string& replan_id) { return "replan:" + replan_id; }

std::vector<std::string> mitigated_by(const Assessment& a, const std::string& control_id) {
    std::set<std::string> out;
    for (const auto& e : a.entries) {
        if (e.control_id == control_id) out.insert(e.ttp_id);
    }
    return {out.begin(), out.end()};
}

json path_json(const std::optional<graph::AttackPath>& path) { return path ? graph::to_json(*path) : json(nullptr); }

json consolidated_inputs(const Assessment& a) {
    json goals = json::array();
    for (const auto& g : a.cti.goals) goals.push_back({{"id", g.id}, {"description", g.description}});
    json assets = json::array();
    for (const auto& asset : a.impacted_assets) {
        assets.push_back(
            {{"asset_id", asset.asset_id}, {"class", graph::to_string(asset.cls)}, {"source", to_string(asset.source)}});
    }
    std::map<std::string, int> counts;
    for (auto cls : {graph::TtpClass::Probable, graph::TtpClass::Plausible, graph::TtpClass::PossibleOnly,
                     graph::TtpClass::Excluded}) {
        counts[std::string(graph::to_string(cls))] = 0;
    }
    for (const auto& c : a.classifications) ++counts[std::string(graph::to_string(c.cls))];
    std::set<std::string> assessors;
    for (const auto& s : a.scores) assessors.insert(s.assessor_id);
    json ranking = json::array();
    for (std::size_t i = 0; i < a.aggregates.size(); ++i) {
        const auto& agg = a.aggregates[i];
        ranking.push_back({{"rank", i + 1},
                           {"ttp_id", agg.ttp_id},
                           {"weighted_total", agg.weighted_total},
                           {"divergence_flags", agg.divergence_flags}});
    }
    return {{"assessment_id", a.id},
            {"mode", to_string(a.mode)},
            {"assume_breach", a.assume_breach},
            {"kb_hash", a.kb_hash},
            {"campaign_id", a.cti.campaign_id},
            {"actor", a.cti.actor},
            {"goals", goals},
            {"impacted_assets", assets},
            {"classification_counts", counts},
            {"scoped_ttps", a.scoped_ttps},
            {"assessors", assessors},
            {"rubric_version", a.rubric.version},
            {"ttp_ranking", ranking},
            {"findings", a.findings}};
}

json effectiveness_conclusions(const Assessment& a) {
    std::set<std::string> on_path;
    if (a.baseline_path) on_path.insert(a.baseline_path->nodes.begin(), a.baseline_path->nodes.end());
    json evaluations = json::array();
    for (std::size_t i = 0; i < a.evaluations.size(); ++i) {
        const auto& e = a.evaluations[i];
        const auto ttps = mitigated_by(a, e.control_id);
        const bool covers_path =
            std::any_of(ttps.begin(), ttps.end(), [&](const std::string& t) { return on_path.contains(t); });
        evaluations.push_back({{"id", eval_ref(e.control_id)},
                               {"rank", i + 1},
                               {"control_id", e.control_id},
                               {"benefit", e.benefit},
                               {"cost", e.cost},
                               {"ratio", e.ratio},
                               {"display_ratio", e.display_ratio()},
                               {"mitigated_ttps", ttps},
                               {"covers_baseline_path", covers_path}});
    }
    json goals = json::array();
    for (const auto& g : a.cti.goals) goals.push_back(g.id);
    return {{"goals", goals}, {"baseline_path", path_json(a.baseline_path)}, {"evaluations", evaluations}};
}

std::vector<Recommendation> build_recommendations(const Assessment& a) {
    std::vector<Recommendation> out;
    auto next_id = [&] { return "rec-" + std::to_string(out.size() + 1); };
    for (std::size_t i = 0; i < a.evaluations.size(); ++i) {
        const auto& e = a.evaluations[i];
        out.push_back({next_id(),
                       "Rank " + std::to_string(i + 1) + ": keep " + e.control_id + ", benefit/cost " +
                           e.display_ratio(),
                       {eval_ref(e.control_id)}});
    }
    for (const auto& control : a.controls) {
        std::optional<eff::UpgradeEffect> best;
        for (const auto& entry : a.entries) {
            if (entry.control_id != control.id || entry.level == eff::Level::High) continue;
            auto effect = eff::upgrade_effect(a.entries, control, entry.ttp_id, entry.criterion, eff::Level::High,
                                              a.matrix);
            if (!best || effect.ratio_delta() > best->ratio_delta()) best = std::move(effect);
        }
        if (!best) continue;
        out.push_back({next_id(),
                       "Raise " + control.id + " " + best->criterion.code() + " on " + best->ttp_id + " from " +
                           eff::level_letter(best->old_level) + " to H: benefit +" +
                           std::to_string(best->benefit_delta) + ", ratio " + eff::format_ratio(best->old_ratio) +
                           " -> " + eff::format_ratio(best->new_ratio),
                       {eval_ref(control.id)}});
    }
    for (const auto& r : a.replans) {
        if (!r.result.paradox) continue;
        out.push_back({next_id(),
                       "Do not retire the control behind " + r.id +
                           " without adding detection on the path the adversary would switch to",
                       {replan_ref(r.id)}});
    }
    return out;
}

json rationale(const Assessment& a) {
    std::map<std::string, std::set<std::string>> assessors_by_ttp;
    for (const auto& s : a.scores) assessors_by_ttp[s.ttp_id].insert(s.assessor_id);
    json controls = json::array();
    for (const auto& e : a.evaluations) {
        std::set<std::string> assessors;
        std::vector<std::string> scored;
        bool attested = true;
        for (const auto& ttp : mitigated_by(a, e.control_id)) {
            if (!std::binary_search(a.scoped_ttps.begin(), a.scoped_ttps.end(), ttp)) continue;
            scored.push_back(ttp);
            const auto& who = assessors_by_ttp[ttp];
            assessors.insert(who.begin(), who.end());
            if (who.size() < 2) attested = false;
        }
        if (scored.empty()) attested = false;
        controls.push_back({{"evaluation_ref", eval_ref(e.control_id)},
                            {"control_id", e.control_id},
                            {"scored_ttps", scored},
                            {"assessors", assessors},
                            {"attested", attested}});
    }
    return {{"controls", controls}, {"signoff", a.signoff}};
}

json strategy_impact(const Assessment& a) {
    json replans = json::array();
    for (const auto& r : a.replans) {
        replans.push_back({{"id", replan_ref(r.id)}, {"description", r.description}, {"result", graph::to_json(r.result)}});
    }
    return {{"baseline_path", path_json(a.baseline_path)}, {"replans", replans}};
}

} // namespace

Report generate_report(Assessment& a, const Clock& clock) {
    if (a.status != Status::Evaluated) {
        throw StatusError("report needs status evaluated, assessment is " + std::string(to_string(a.status)));
    }
    a.recommendations = build_recommendations(a);
    json recs = json::array();
    for (const auto& r : a.recommendations) recs.push_back({{"id", r.id}, {"text", r.text}, {"refs", r.refs}});

    json sections = json::array();
    sections.push_back({{"index", 1}, {"id", "consolidated_inputs"}, {"title", "Consolidated inputs"},
                        {"body", consolidated_inputs(a)}});
    sections.push_back({{"index", 2}, {"id", "effectiveness_conclusions"}, {"title", "Effectiveness conclusions"},
                        {"body", effectiveness_conclusions(a)}});
    sections.push_back({{"index", 3}, {"id", "recommendations"}, {"title", "Recommendations"},
                        {"body", {{"recommendations", recs}}}});
    sections.push_back({{"index", 4}, {"id", "effectiveness_rationale"}, {"title", "Effectiveness rationale"},
                        {"body", rationale(a)}});
    sections.push_back({{"index", 5}, {"id", "strategy_impact"}, {"title", "Strategy impact"},
                        {"body", strategy_impact(a)}});

    a.status = Status::Reported;
    a.updated_at = clock();
    json document = {{"assessment_id", a.id}, {"generated_at", a.updated_at}, {"sections", sections}};
    a.report = document;
    return {document, render_markup(document)};
}

std::string render_markup(const json& document) {
    std::ostringstream out;
    out << "TIBSA report: " << document.value("assessment_id", "") << "\n";
    out << "Generated " << document.value("generated_at", "") << "\n";
    for (const auto& section : document.at("sections")) {
        const auto& body = section.at("body");
        out << "\n== " << section.at("index").get<int>() << ". " << section.at("title").get<std::string>() << " ==\n";
        const std::string id = section.at("id").get<std::string>();
        if (id == "consolidated_inputs") {
            out << "Mode: " << body.at("mode").get<std::string>()
                << (body.at("assume_breach").get<bool>() ? " (assume breach)" : " (perimeter)") << "\n";
            out << "Campaign: " << body.at("campaign_id").get<std::string>() << ", actor "
                << body.at("actor").get<std::string>() << "\n";
            for (const auto& asset : body.at("impacted_assets")) {
                out << "- asset " << asset.at("asset_id").get<std::string>() << " ["
                    << asset.at("class").get<std::string>() << ", " << asset.at("source").get<std::string>() << "]\n";
            }
            for (const auto& row : body.at("ttp_ranking")) {
                out << "- " << row.at("rank").get<int>() << ". " << row.at("ttp_id").get<std::string>() << " total "
                    << row.at("weighted_total").get<double>() << "\n";
            }
            for (const auto& f : body.at("findings")) out << "! " << f.get<std::string>() << "\n";
        } else if (id == "effectiveness_conclusions") {
            for (const auto& e : body.at("evaluations")) {
                out << "- " << e.at("rank").get<int>() << ". " << e.at("control_id").get<std::string>()
                    << " benefit " << e.at("benefit").get<int>() << " cost " << e.at("cost").get<double>()
                    << " ratio " << e.at("display_ratio").get<std::string>()
                    << (e.at("covers_baseline_path").get<bool>() ? " (on baseline path)" : "") << "\n";
            }
        } else if (id == "recommendations") {
            for (const auto& r : body.at("recommendations")) {
                out << "- " << r.at("id").get<std::string>() << ": " << r.at("text").get<std::string>() << " [";
                bool first = true;
                for (const auto& ref : r.at("refs")) {
                    out << (first ? "" : ", ") << ref.get<std::string>();
                    first = false;
                }
                out << "]\n";
            }
        } else if (id == "effectiveness_rationale") {
            for (const auto& c : body.at("controls")) {
                out << "- " << c.at("control_id").get<std::string>() << ": "
                    << (c.at("attested").get<bool>() ? "attested" : "not attested") << " by "
                    << c.at("assessors").size() << " assessor(s)\n";
            }
            if (!body.at("signoff").get<std::string>().empty()) {
                out << "Sign-off: " << body.at("signoff").get<std::string>() << "\n";
            }
        } else if (id == "strategy_impact") {
            const auto& base = body.at("baseline_path");
            if (base.is_null()) {
                out << "No viable adversary path.\n";
            } else {
                out << "Baseline path:";
                for (const auto& n : base.at("nodes")) out << " " << n.get<std::string>();
                out << "\n";
            }
            for (const auto& r : body.at("replans")) {
                out << "- " << r.at("id").get<std::string>() << (r.at("result").at("paradox").get<bool>() ? ": PARADOX" : ": ok")
                    << "\n";
            }
        }
    }
    return out.str();
}

} // namespace tibsa::registry
