// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors

#include <algorithm>

#include "tibsa/assessment.hpp"
#include "tibsa/error.hpp"

namespace tibsa::registry {

using nlohmann::json;
namespace eff = effectiveness;

namespace {

std::string_view kind_name(Change::Kind kind) {
    switch (kind) {
    case Change::Kind::AddControl: return "add_control";
    case Change::Kind::RemoveControl: return "remove_control";
    case Change::Kind::ChangeLevel: return "change_level";
    }
    return "change_level";
}

} // namespace

WhatIfResult whatif(const Assessment& a, std::span<const Change> changes) {
    if (a.status != Status::Evaluated && a.status != Status::Reported) {
        throw StatusError("what-if needs an evaluated assessment, status is " + std::string(to_string(a.status)));
    }
    std::vector<eff::ControlRecord> controls = a.controls;
    std::vector<eff::MitigationEntry> entries = a.entries;
    WhatIfResult result;
    std::vector<std::string> findings;

    auto has_control = [&](std::string_view id) {
        return std::any_of(controls.begin(), controls.end(), [&](const eff::ControlRecord& c) { return c.id == id; });
    };
    auto known_ttp = [&](std::string_view id) {
        const auto* n = a.graph.find_node(id);
        return n != nullptr && n->is_technique();
    };

    for (const auto& change : changes) {
        switch (change.kind) {
        case Change::Kind::AddControl: {
            if (change.control.id.empty()) {
                findings.emplace_back("add_control needs a control id");
                break;
            }
            if (has_control(change.control.id)) {
                findings.push_back("control '" + change.control.id + "' already exists");
                break;
            }
            controls.push_back(change.control);
            for (auto e : change.entries) {
                if (!known_ttp(e.ttp_id)) findings.push_back("unknown ttp '" + e.ttp_id + "'");
                if (!a.matrix.contains(e.criterion)) findings.push_back("unknown criterion '" + e.criterion.code() + "'");
                e.control_id = change.control.id;
                entries.push_back(std::move(e));
            }
            result.added.push_back(change.control.id);
            break;
        }
        case Change::Kind::RemoveControl: {
            if (!has_control(change.control_id)) {
                findings.push_back("unknown control '" + change.control_id + "'");
                break;
            }
            std::erase_if(controls, [&](const eff::ControlRecord& c) { return c.id == change.control_id; });
            std::erase_if(entries, [&](const eff::MitigationEntry& e) { return e.control_id == change.control_id; });
            result.removed.push_back(change.control_id);
            break;
        }
        case Change::Kind::ChangeLevel: {
            auto control = std::find_if(controls.begin(), controls.end(),
                                        [&](const eff::ControlRecord& c) { return c.id == change.control_id; });
            if (control == controls.end()) {
                findings.push_back("unknown control '" + change.control_id + "'");
                break;
            }
            if (!known_ttp(change.ttp_id)) {
                findings.push_back("unknown ttp '" + change.ttp_id + "'");
                break;
            }
            try {
                result.upgrades.push_back(eff::upgrade_effect(entries, *control, change.ttp_id, change.criterion,
                                                              change.level, a.matrix));
            } catch (const NotFoundError& e) {
                findings.emplace_back(e.what());
                break;
            }
            for (auto& e : entries) {
                if (e.control_id == change.control_id && e.ttp_id == change.ttp_id && e.criterion == change.criterion) {
                    e.level = change.level;
                }
            }
            break;
        }
        }
    }
    if (!findings.empty()) throw ValidationError(std::move(findings));

    result.evaluations = eff::evaluate_controls(controls, entries, a.matrix);
    for (const auto& after : result.evaluations) {
        auto before = std::find_if(a.evaluations.begin(), a.evaluations.end(),
                                   [&](const eff::ControlEvaluation& e) { return e.control_id == after.control_id; });
        if (before == a.evaluations.end()) continue;
        result.ratio_deltas[after.control_id] = after.ratio - before->ratio;
        result.benefit_deltas[after.control_id] = after.benefit - before->benefit;
    }
    result.replan = graph::replan_after_control(a.adversary_context(), a.entries, entries, a.aggregates);
    return result;
}

Change parse_change(const json& doc, const eff::ScoreMatrix& matrix) {
    if (!doc.is_object() || !doc.contains("kind") || !doc["kind"].is_string()) {
        throw ParseError("change.kind", "missing or not a string");
    }
    const std::string kind = doc["kind"].get<std::string>();
    Change c;
    try {
        if (kind == "add_control") {
            c.kind = Change::Kind::AddControl;
            json wrapper = {{"schema_version", "1"}, {"controls", json::array({doc.at("control")})}};
            auto inventory = eff::parse_inventory(wrapper, matrix);
            c.control = inventory.controls.front();
            c.entries = std::move(inventory.entries);
        } else if (kind == "remove_control") {
            c.kind = Change::Kind::RemoveControl;
            c.control_id = doc.at("control_id").get<std::string>();
        } else if (kind == "change_level") {
            c.kind = Change::Kind::ChangeLevel;
            c.control_id = doc.at("control_id").get<std::string>();
            c.ttp_id = doc.at("ttp_id").get<std::string>();
            c.criterion = matrix.parse_criterion(doc.at("criterion").get<std::string>());
            c.level = eff::parse_level(doc.at("level").get<std::string>());
        } else {
            throw ParseError("change.kind", "unknown change kind '" + kind + "'");
        }
    } catch (const json::exception& e) {
        throw ParseError("change", e.what());
    }
    return c;
}

json to_json(const Change& c) {
    json out = {{"kind", kind_name(c.kind)}};
    switch (c.kind) {
    case Change::Kind::AddControl: {
        auto inventory = eff::to_json(eff::ControlInventory{{c.control}, c.entries});
        out["control"] = inventory["controls"][0];
        break;
    }
    case Change::Kind::RemoveControl: out["control_id"] = c.control_id; break;
    case Change::Kind::ChangeLevel:
        out["control_id"] = c.control_id;
        out["ttp_id"] = c.ttp_id;
        out["criterion"] = c.criterion.code();
        out["level"] = std::string(1, eff::level_letter(c.level));
        break;
    }
    return out;
}

json to_json(const WhatIfResult& r) {
    json evaluations = json::array();
    for (std::size_t i = 0; i < r.evaluations.size(); ++i) {
        const auto& e = r.evaluations[i];
        evaluations.push_back({{"rank", i + 1},
                               {"control_id", e.control_id},
                               {"benefit", e.benefit},
                               {"cost", e.cost},
                               {"ratio", e.ratio},
                               {"display_ratio", e.display_ratio()}});
    }
    json ranking = json::array();
    for (const auto& e : r.evaluations) ranking.push_back(e.control_id);
    json upgrades = json::array();
    for (const auto& u : r.upgrades) {
        upgrades.push_back({{"control_id", u.control_id},
                            {"ttp_id", u.ttp_id},
                            {"criterion", u.criterion.code()},
                            {"old_level", std::string(1, eff::level_letter(u.old_level))},
                            {"new_level", std::string(1, eff::level_letter(u.new_level))},
                            {"benefit_delta", u.benefit_delta},
                            {"old_ratio", u.old_ratio},
                            {"new_ratio", u.new_ratio},
                            {"ratio_delta", u.ratio_delta()},
                            {"evaluation_id", "eval:" + u.control_id}});
    }
    return {{"evaluations", evaluations},
            {"ranking", ranking},
            {"ratio_deltas", r.ratio_deltas},
            {"benefit_deltas", r.benefit_deltas},
            {"added", r.added},
            {"removed", r.removed},
            {"upgrades", upgrades},
            {"replan", graph::to_json(r.replan)},
            {"paradox", r.replan.paradox}};
}

} // namespace tibsa::registry
