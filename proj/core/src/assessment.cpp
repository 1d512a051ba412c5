// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors

#include "tibsa/assessment.hpp"

#include <algorithm>

#include "tibsa/error.hpp"
#include "tibsa/hash.hpp"

namespace tibsa::registry {

namespace eff = effectiveness;

std::string_view to_string(Mode mode) { return mode == Mode::Rapid ? "rapid" : "full"; }

std::string_view to_string(Status status) {
    switch (status) {
    case Status::Draft: return "draft";
    case Status::Scored: return "scored";
    case Status::Evaluated: return "evaluated";
    case Status::Reported: return "reported";
    }
    return "draft";
}

std::string_view to_string(AssetSource source) {
    return source == AssetSource::CtiDirect ? "cti_direct" : "goal_analysis";
}

Mode parse_mode(std::string_view text) {
    if (text == "full") return Mode::Full;
    if (text == "rapid") return Mode::Rapid;
    throw ParseError("mode", "expected full or rapid, got '" + std::string(text) + "'");
}

Status parse_status(std::string_view text) {
    for (auto s : {Status::Draft, Status::Scored, Status::Evaluated, Status::Reported}) {
        if (to_string(s) == text) return s;
    }
    throw ParseError("status", "unknown status '" + std::string(text) + "'");
}

AssetSource parse_asset_source(std::string_view text) {
    if (text == "cti_direct") return AssetSource::CtiDirect;
    if (text == "goal_analysis") return AssetSource::GoalAnalysis;
    throw ParseError("source", "unknown asset source '" + std::string(text) + "'");
}

Clock system_clock() {
    return [] { return utc_now_iso8601(); };
}

void Settings::validate() const {
    std::vector<std::string> findings;
    if (probable_threshold < 1 || probable_threshold > 5) findings.emplace_back("probable_threshold must be in [1,5]");
    if (divergence_threshold < 1 || divergence_threshold > 4) {
        findings.emplace_back("divergence_threshold must be in [1,4]");
    }
    if (max_depth < 1 || max_depth > 32) findings.emplace_back("max_depth must be in [1,32]");
    if (!findings.empty()) throw ValidationError(std::move(findings));
}

const graph::TtpClassification* Assessment::classification(std::string_view ttp_id) const {
    auto it = std::find_if(classifications.begin(), classifications.end(),
                           [&](const graph::TtpClassification& c) { return c.ttp_id == ttp_id; });
    return it == classifications.end() ? nullptr : &*it;
}

graph::AdversaryContext Assessment::adversary_context() const {
    return {graph, landscape, classifications, settings.max_depth, matrix};
}

namespace {

int class_rank(graph::TtpClass cls) {
    switch (cls) {
    case graph::TtpClass::Probable: return 3;
    case graph::TtpClass::Plausible: return 2;
    case graph::TtpClass::PossibleOnly: return 1;
    case graph::TtpClass::Excluded: return 0;
    }
    return 0;
}

void touch(Assessment& a, const Clock& clock) { a.updated_at = clock(); }

std::string asset_id_of(const std::string& node) {
    const std::string prefix = std::string(graph::to_string(graph::NodeKind::Asset)) + ":";
    return node.rfind(prefix, 0) == 0 ? node.substr(prefix.size()) : node;
}

} // namespace

Assessment create_assessment(std::string id, Mode mode, const kb::KnowledgeBase& kb, const graph::CtiReport& cti,
                             const graph::LandscapeInventory& landscape, const scoring::Rubric& rubric,
                             const CreateOptions& options) {
    if (id.empty()) throw ValidationError("assessment id must not be empty");
    options.settings.validate();
    rubric.validate();
    if (auto findings = options.matrix.check_invariants(); !findings.empty()) throw ValidationError(std::move(findings));

    Assessment a;
    a.id = std::move(id);
    a.mode = mode;
    a.assume_breach = mode == Mode::Full;
    a.created_at = options.clock();
    a.updated_at = a.created_at;
    a.kb_hash = kb.content_hash();
    a.cti = cti;
    a.landscape = landscape;
    a.rubric = rubric;
    a.matrix = options.matrix;
    a.settings = options.settings;
    a.graph = graph::build_graph(kb, cti, landscape, options.graph);
    a.classifications = graph::classify_ttps(a.graph, kb, cti, landscape, {options.settings.probable_threshold});

    for (const auto& c : a.classifications) {
        const bool in_scope = mode == Mode::Rapid ? c.cls == graph::TtpClass::Probable : c.cls != graph::TtpClass::Excluded;
        if (in_scope) a.scoped_ttps.push_back(c.ttp_id);
    }

    // Asset class: the strongest class among the techniques targeting it.
    auto asset_class = [&](const std::string& node) {
        int best = class_rank(graph::TtpClass::PossibleOnly);
        graph::TtpClass cls = graph::TtpClass::PossibleOnly;
        for (std::size_t e : a.graph.in_edges(node)) {
            const auto& edge = a.graph.edges()[e];
            const auto* c = a.classification(edge.from);
            if (c != nullptr && class_rank(c->cls) > best) {
                best = class_rank(c->cls);
                cls = c->cls;
            }
        }
        return cls;
    };

    std::set<std::string> listed;
    for (const auto& hint : cti.provided_assets) {
        const std::string node = graph::node_id(graph::NodeKind::Asset, hint.asset_id);
        if (!listed.insert(hint.asset_id).second) continue;
        a.impacted_assets.push_back({hint.asset_id, asset_class(node), AssetSource::CtiDirect});
    }
    std::set<std::string> on_paths;
    for (const auto& goal : a.graph.goal_ids()) {
        for (const auto& path : graph::enumerate_paths(a.graph, goal, a.settings.max_depth, landscape)) {
            for (const auto& node : path.nodes) {
                const auto* n = a.graph.find_node(node);
                if (n != nullptr && n->kind == graph::NodeKind::Asset) on_paths.insert(node);
            }
        }
    }
    for (const auto& node : on_paths) {
        const std::string asset = asset_id_of(node);
        if (listed.contains(asset)) continue;
        if (!a.assume_breach) {
            const auto* record = landscape.find_asset(asset);
            if (record == nullptr || record->zone != graph::Zone::InternetFacing) continue;
        }
        listed.insert(asset);
        a.impacted_assets.push_back({asset, asset_class(node), AssetSource::GoalAnalysis});
    }
    return a;
}

void submit_scores(Assessment& a, std::span<const scoring::AssessorScore> scores, const Clock& clock) {
    if (a.status != Status::Draft && a.status != Status::Scored) {
        throw StatusError("scores can only be submitted while draft or scored, assessment is " +
                          std::string(to_string(a.status)));
    }
    std::vector<std::string> findings;
    for (const auto& s : scores) {
        if (s.assessor_id.empty()) findings.push_back("score for '" + s.ttp_id + "' has no assessor_id");
        if (!std::binary_search(a.scoped_ttps.begin(), a.scoped_ttps.end(), s.ttp_id)) {
            findings.push_back("'" + s.ttp_id + "' is not in the assessment scope");
        }
        for (const auto& f : scoring::validate_score(a.rubric, s)) {
            findings.push_back(s.assessor_id + "/" + s.ttp_id + ": " + f.message);
        }
    }
    if (!findings.empty()) throw ValidationError(std::move(findings));
    for (const auto& s : scores) {
        auto it = std::find_if(a.scores.begin(), a.scores.end(), [&](const scoring::AssessorScore& x) {
            return x.assessor_id == s.assessor_id && x.ttp_id == s.ttp_id;
        });
        if (it != a.scores.end()) {
            *it = s;
        } else {
            a.scores.push_back(s);
        }
    }
    std::sort(a.scores.begin(), a.scores.end(), [](const auto& x, const auto& y) {
        return std::tie(x.ttp_id, x.assessor_id) < std::tie(y.ttp_id, y.assessor_id);
    });
    a.status = Status::Scored;
    touch(a, clock);
}

void set_controls(Assessment& a, const eff::ControlInventory& inventory, const Clock& clock) {
    if (a.status == Status::Reported) throw StatusError("controls cannot change after the report");
    std::vector<std::string> findings;
    std::set<std::string> ids;
    for (const auto& c : inventory.controls) ids.insert(c.id);
    for (const auto& e : inventory.entries) {
        if (!ids.contains(e.control_id)) findings.push_back("entry names unknown control '" + e.control_id + "'");
        const auto* node = a.graph.find_node(e.ttp_id);
        if (node == nullptr || !node->is_technique()) {
            findings.push_back("control '" + e.control_id + "' mitigates '" + e.ttp_id + "', which is not in the graph");
        }
        if (!a.matrix.contains(e.criterion)) findings.push_back("unknown criterion '" + e.criterion.code() + "'");
    }
    if (!findings.empty()) throw ValidationError(std::move(findings));
    a.controls = inventory.controls;
    a.entries = inventory.entries;
    touch(a, clock);
}

void run_pipeline(Assessment& a, const Clock& clock) {
    if (a.status == Status::Reported) throw StatusError("assessment is already reported");

    std::map<std::string, std::vector<scoring::AssessorScore>> by_ttp;
    for (const auto& s : a.scores) by_ttp[s.ttp_id].push_back(s);
    std::vector<std::string> missing;
    for (const auto& ttp : a.scoped_ttps) {
        if (!by_ttp.contains(ttp)) missing.push_back("missing scores for '" + ttp + "'");
    }
    if (!missing.empty()) throw ValidationError(std::move(missing));

    std::vector<scoring::AggregatedScore> aggregates;
    for (const auto& ttp : a.scoped_ttps) {
        aggregates.push_back(scoring::aggregate(a.rubric, by_ttp[ttp], {a.settings.divergence_threshold}));
    }
    a.aggregates = scoring::rank_ttps(std::move(aggregates));

    std::vector<std::string> columns = a.scoped_ttps;
    std::set<std::string> extra;
    for (const auto& e : a.entries) {
        if (!std::binary_search(a.scoped_ttps.begin(), a.scoped_ttps.end(), e.ttp_id)) extra.insert(e.ttp_id);
    }
    columns.insert(columns.end(), extra.begin(), extra.end());
    a.coverage = eff::coverage_matrix(a.controls, a.entries, columns);
    a.evaluations = eff::evaluate_controls(a.controls, a.entries, a.matrix);

    const auto context = a.adversary_context();
    a.baseline_path = graph::adversary_best_path(context, a.entries);
    a.replans.clear();
    for (const auto& control : a.controls) {
        std::vector<eff::MitigationEntry> without;
        std::copy_if(a.entries.begin(), a.entries.end(), std::back_inserter(without),
                     [&](const eff::MitigationEntry& e) { return e.control_id != control.id; });
        a.replans.push_back({"remove-" + control.id, "adversary replan if " + control.id + " is removed",
                             graph::replan_after_control(context, a.entries, without, a.aggregates)});
    }

    a.findings.clear();
    for (const auto& agg : a.aggregates) {
        for (const auto& criterion : agg.divergence_flags) {
            a.findings.push_back("assessors diverge on " + criterion + " for " + agg.ttp_id);
        }
    }
    std::set<std::string> covered;
    for (const auto& e : a.entries) covered.insert(e.ttp_id);
    for (const auto& ttp : a.scoped_ttps) {
        if (!covered.contains(ttp)) a.findings.push_back("no control mitigates " + ttp);
    }
    if (!a.baseline_path) a.findings.emplace_back("no viable adversary path to any goal");
    for (const auto& r : a.replans) {
        if (r.result.paradox) {
            a.findings.push_back("replan:" + r.id + " moves the adversary to a less detected or costlier path");
        }
    }

    if (a.status != Status::Evaluated) a.status = Status::Evaluated;
    touch(a, clock);
}

std::string content_hash(const Assessment& a) {
    auto doc = to_json(a);
    doc.erase("created_at");
    doc.erase("updated_at");
    if (doc["report"].is_object()) doc["report"].erase("generated_at");
    return json_hash(doc);
}

} // namespace tibsa::registry
