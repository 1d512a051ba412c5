// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors
//
// Seeded random inputs for property tests.

#pragma once

#include <random>
#include <string>
#include <vector>

#include "tibsa/assessment.hpp"
#include "tibsa/register.hpp"

namespace tibsa::testing {

struct Scenario {
    kb::KnowledgeBase kb;
    graph::CtiReport cti;
    graph::LandscapeInventory landscape;
};

/// Campaign over up to `max_ttps` techniques. leads_to only points at
/// higher-numbered techniques so the result is always acyclic.
inline Scenario random_scenario(std::mt19937& rng, int max_ttps = 7) {
    static const std::vector<std::string> platforms{"Windows", "Linux", "macOS"};
    static const std::vector<graph::Zone> zones{graph::Zone::InternetFacing, graph::Zone::Internal,
                                                graph::Zone::Isolated};
    std::uniform_int_distribution<int> n_dist(2, max_ttps), level(1, 5), quarter(0, 3), zone(0, 2);
    Scenario s;
    const int n = n_dist(rng);
    for (int i = 0; i < n; ++i) {
        kb::TechniqueRecord t;
        t.id = "T" + std::to_string(1000 + i);
        t.name = "technique " + std::to_string(i);
        t.tactic_ids = {"TA000" + std::to_string(i % 3)};
        if (quarter(rng) == 0) t.tactic_ids.push_back("TA0009");
        for (const auto& p : platforms) {
            if (quarter(rng) == 0) t.platforms.push_back(p);
        }
        s.kb.add(std::move(t));
    }
    for (int i = 0; i < 3; ++i) {
        if (quarter(rng) == 3) continue;
        graph::Asset a;
        a.id = "asset-" + std::to_string(i);
        a.platforms = {platforms[static_cast<std::size_t>(i)]};
        a.zone = zones[static_cast<std::size_t>(zone(rng))];
        s.landscape.assets.push_back(std::move(a));
    }
    if (quarter(rng) == 0) s.landscape.exclusions.push_back({"T1000", "contradicted by the landscape"});

    s.cti.campaign_id = "random";
    s.cti.actor = "X";
    s.cti.goals = {{"G", "goal"}};
    for (int i = 0; i < n; ++i) {
        const std::string id = "T" + std::to_string(1000 + i);
        if (quarter(rng) == 0) {
            if (quarter(rng) == 0) s.cti.adaptations.push_back(id);
            continue;
        }
        graph::Evidence e;
        e.ttp_id = id;
        e.evidence_level = level(rng);
        e.confidence = level(rng);
        for (int j = i + 1; j < n; ++j) {
            if (quarter(rng) == 0) e.leads_to.push_back("T" + std::to_string(1000 + j));
        }
        if (quarter(rng) < 2) e.achieves.push_back("G");
        s.cti.evidence.push_back(std::move(e));
    }
    if (!s.landscape.assets.empty() && !s.cti.evidence.empty() && quarter(rng) == 0) {
        s.cti.provided_assets.push_back({s.landscape.assets.front().id, {s.cti.evidence.front().ttp_id}});
    }
    return s;
}

inline std::vector<scoring::AssessorScore> random_scores(std::mt19937& rng, const scoring::Rubric& rubric,
                                                         const std::vector<std::string>& ttps, int assessors) {
    std::uniform_int_distribution<int> v(1, 5);
    std::vector<scoring::AssessorScore> out;
    for (const auto& ttp : ttps) {
        for (int i = 0; i < assessors; ++i) {
            scoring::AssessorScore s{"assessor-" + std::to_string(i), ttp, {}};
            for (const auto& c : rubric.criteria) s.values[c.id] = v(rng);
            out.push_back(std::move(s));
        }
    }
    return out;
}

inline effectiveness::ControlInventory random_inventory(std::mt19937& rng, const std::vector<std::string>& ttps) {
    static const char* codes[] = {"PR", "DT", "CS", "RE"};
    std::uniform_int_distribution<int> n(1, 4), lvl(0, 2), coin(0, 2), cost(1, 4);
    effectiveness::ControlInventory inv;
    const int count = n(rng);
    for (int c = 0; c < count; ++c) {
        effectiveness::ControlRecord control{"C" + std::to_string(c), "control " + std::to_string(c),
                                             {static_cast<double>(cost(rng)), 0.5 * cost(rng), 0}};
        for (const auto& ttp : ttps) {
            for (const char* code : codes) {
                if (coin(rng) == 0) {
                    inv.entries.push_back({control.id, ttp, effectiveness::Criterion(code),
                                           static_cast<effectiveness::Level>(lvl(rng))});
                }
            }
        }
        inv.controls.push_back(std::move(control));
    }
    return inv;
}

/// An assessment carried to a random stage of its lifecycle.
inline registry::Assessment random_assessment(std::mt19937& rng, const std::string& id) {
    const auto s = random_scenario(rng, 5);
    std::uniform_int_distribution<int> stage(0, 3), assessors(1, 3), coin(0, 1);
    registry::CreateOptions options;
    options.clock = [] { return std::string("2026-05-01T00:00:00Z"); };
    const auto mode = coin(rng) ? registry::Mode::Full : registry::Mode::Rapid;
    auto a = registry::create_assessment(id, mode, s.kb, s.cti, s.landscape, scoring::default_rubric(), options);
    const int target = stage(rng);
    if (target >= 1 && !a.scoped_ttps.empty()) {
        registry::submit_scores(a, random_scores(rng, a.rubric, a.scoped_ttps, assessors(rng)), options.clock);
    }
    if (target >= 2) {
        registry::set_controls(a, random_inventory(rng, a.graph.technique_ids()), options.clock);
        registry::run_pipeline(a, options.clock);
    }
    if (target >= 3) {
        if (coin(rng)) a.signoff = "approved by the risk committee";
        registry::generate_report(a, options.clock);
    }
    return a;
}

inline registry::RiskRegister random_register(std::mt19937& rng) {
    std::uniform_int_distribution<int> n(0, 3);
    registry::RiskRegister r;
    const int count = n(rng);
    for (int i = 0; i < count; ++i) {
        r.put(random_assessment(rng, "A" + std::to_string(i)), "tester", "create");
    }
    if (count > 0 && n(rng) == 0) {
        kb::KnowledgeBase kb = random_scenario(rng, 3).kb;
        r.store_kb(kb);
    }
    return r;
}

} // namespace tibsa::testing
