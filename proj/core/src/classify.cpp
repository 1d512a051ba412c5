// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors

#include <algorithm>
#include <cctype>

#include "tibsa/causal_graph.hpp"
#include "tibsa/error.hpp"

namespace tibsa::graph {

std::string_view to_string(TtpClass cls) {
    switch (cls) {
    case TtpClass::Probable: return "probable";
    case TtpClass::Plausible: return "plausible";
    case TtpClass::PossibleOnly: return "possible";
    case TtpClass::Excluded: return "excluded";
    }
    return "possible";
}

std::string_view to_string(Sphere sphere) {
    return sphere == Sphere::Risk ? "risk" : "uncertainty";
}

TtpClass parse_ttp_class(std::string_view text) {
    for (auto c : {TtpClass::Probable, TtpClass::Plausible, TtpClass::PossibleOnly, TtpClass::Excluded}) {
        if (to_string(c) == text) return c;
    }
    throw ParseError("class", "unknown TTP class '" + std::string(text) + "'");
}

Sphere parse_sphere(std::string_view text) {
    if (text == "risk") return Sphere::Risk;
    if (text == "uncertainty") return Sphere::Uncertainty;
    throw ParseError("sphere", "unknown sphere '" + std::string(text) + "'");
}

Sphere sphere_for(TtpClass cls) {
    return cls == TtpClass::Probable ? Sphere::Risk : Sphere::Uncertainty;
}

namespace {

std::string lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

} // namespace

std::vector<TtpClassification> classify_ttps(const CausalGraph& graph, const kb::KnowledgeBase& kb,
                                             const CtiReport& cti, const LandscapeInventory& landscape,
                                             const ClassifyOptions& options) {
    std::set<std::string> landscape_platforms;
    for (const auto& a : landscape.assets) {
        for (const auto& p : a.platforms) landscape_platforms.insert(lower(p));
    }

    auto tactics_of = [&](const std::string& ttp) {
        std::set<std::string> out;
        for (std::size_t e : graph.out_edges(ttp)) {
            const auto& edge = graph.edges()[e];
            const auto* target = graph.find_node(edge.to);
            if (target != nullptr && target->kind == NodeKind::Tactic) out.insert(target->id);
        }
        return out;
    };

    std::vector<TtpClassification> out;
    std::set<std::string> anchor_tactics;
    for (const auto& ttp : graph.technique_ids()) {
        const auto* record = kb.find_technique(ttp);
        if (record == nullptr) throw NotFoundError("technique '" + ttp + "' is not in the knowledge base");
        const auto* evidence = cti.find_evidence(ttp);
        const int level = evidence ? evidence->evidence_level : 0;
        const bool evidenced = level >= options.probable_threshold;

        TtpClassification c;
        c.ttp_id = ttp;
        const bool platform_match =
            record->platforms.empty() ||
            std::any_of(record->platforms.begin(), record->platforms.end(),
                        [&](const std::string& p) { return landscape_platforms.contains(lower(p)); });
        if (landscape.excludes(ttp)) {
            c.cls = TtpClass::Excluded;
            c.rationale.emplace_back(reason::kLandscapeExclusion);
        } else if (!platform_match) {
            c.cls = TtpClass::Excluded;
            c.rationale.emplace_back(reason::kNoPlatformMatch);
        } else {
            c.rationale.emplace_back(reason::kPlatformMatch);
            c.cls = evidenced ? TtpClass::Probable : TtpClass::PossibleOnly;
        }
        c.rationale.emplace_back(evidenced ? reason::kEvidenceAtThreshold : reason::kEvidenceBelowThreshold);
        // Blocked but evidenced TTPs still anchor adaptation: the adversary
        // looks for a sibling under the same tactic.
        if (evidenced) {
            for (const auto& t : tactics_of(ttp)) anchor_tactics.insert(t);
        }
        out.push_back(std::move(c));
    }

    const std::set<std::string> adaptations(cti.adaptations.begin(), cti.adaptations.end());
    for (auto& c : out) {
        if (c.cls != TtpClass::PossibleOnly) continue;
        const auto tactics = tactics_of(c.ttp_id);
        const bool sibling = std::any_of(tactics.begin(), tactics.end(),
                                         [&](const std::string& t) { return anchor_tactics.contains(t); });
        if (sibling) c.rationale.emplace_back(reason::kTacticSibling);
        if (adaptations.contains(c.ttp_id)) c.rationale.emplace_back(reason::kAnalystAdaptation);
        if (sibling || adaptations.contains(c.ttp_id)) c.cls = TtpClass::Plausible;
    }
    for (auto& c : out) c.sphere = sphere_for(c.cls);
    return out;
}

} // namespace tibsa::graph
