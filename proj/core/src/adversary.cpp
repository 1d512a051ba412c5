// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors

#include <algorithm>
#include <map>

#include "tibsa/causal_graph.hpp"

namespace tibsa::graph {

namespace eff = effectiveness;

namespace {

bool on_path(const AttackPath& path, std::string_view ttp) {
    return std::find(path.nodes.begin(), path.nodes.end(), ttp) != path.nodes.end();
}

} // namespace

int detect_coverage(const AttackPath& path, std::span<const eff::MitigationEntry> entries,
                    const eff::ScoreMatrix& matrix) {
    int total = 0;
    for (const auto& e : entries) {
        if (e.criterion == eff::Criterion::detect() && on_path(path, e.ttp_id)) total += matrix.score(e.criterion, e.level);
    }
    return total;
}

double impact_score(const AttackPath& path, std::span<const scoring::AggregatedScore> aggregates) {
    double total = 0;
    for (const auto& a : aggregates) {
        if (!on_path(path, a.ttp_id)) continue;
        total += a.mean(scoring::criteria::kRecoveryTime) + a.mean(scoring::criteria::kRestoreCost);
    }
    return total;
}

std::optional<AttackPath> adversary_best_path(const AdversaryContext& context,
                                              std::span<const eff::MitigationEntry> entries) {
    std::map<std::string, TtpClass, std::less<>> classes;
    for (const auto& c : context.classifications) classes.emplace(c.ttp_id, c.cls);

    std::optional<AttackPath> best;
    for (const auto& goal : context.graph.goal_ids()) {
        for (auto& path : enumerate_paths(context.graph, goal, context.max_depth, context.landscape)) {
            bool viable = true;
            for (const auto& node : path.nodes) {
                const auto* n = context.graph.find_node(node);
                if (n == nullptr || !n->is_technique()) continue;
                auto it = classes.find(node);
                if (it == classes.end() || (it->second != TtpClass::Probable && it->second != TtpClass::Plausible)) {
                    viable = false;
                    break;
                }
            }
            if (!viable) continue;
            const bool blocked = std::any_of(entries.begin(), entries.end(), [&](const eff::MitigationEntry& e) {
                return e.criterion == eff::Criterion::prevent() && e.level == eff::Level::High &&
                       on_path(path, e.ttp_id);
            });
            if (blocked) continue;
            path.detect_coverage = detect_coverage(path, entries, context.matrix);
            path.viable = true;
            const bool better = !best || path.propensity > best->propensity ||
                                (path.propensity == best->propensity &&
                                 (path.detect_coverage < best->detect_coverage ||
                                  (path.detect_coverage == best->detect_coverage && path.nodes < best->nodes)));
            if (better) best = std::move(path);
        }
    }
    return best;
}

ReplanResult replan_after_control(const AdversaryContext& context, std::span<const eff::MitigationEntry> before,
                                  std::span<const eff::MitigationEntry> after,
                                  std::span<const scoring::AggregatedScore> aggregates) {
    ReplanResult r;
    r.old_path = adversary_best_path(context, before);
    r.new_path = adversary_best_path(context, after);
    if (r.old_path) r.old_impact = impact_score(*r.old_path, aggregates);
    if (r.new_path) r.new_impact = impact_score(*r.new_path, aggregates);
    if (r.old_path && r.new_path) {
        r.paradox = r.new_path->detect_coverage < r.old_path->detect_coverage || r.new_impact > r.old_impact;
        r.deltas.propensity = r.new_path->propensity - r.old_path->propensity;
        r.deltas.detect_coverage = r.new_path->detect_coverage - r.old_path->detect_coverage;
        r.deltas.impact = r.new_impact - r.old_impact;
    }
    return r;
}

} // namespace tibsa::graph
