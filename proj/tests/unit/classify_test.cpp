// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors

#include <doctest.h>

#include <map>

#include "fixtures.hpp"
#include "tibsa/causal_graph.hpp"

using namespace tibsa;
using namespace tibsa::graph;

namespace {

std::map<std::string, TtpClassification> by_id(const std::vector<TtpClassification>& list) {
    std::map<std::string, TtpClassification> out;
    for (const auto& c : list) out[c.ttp_id] = c;
    return out;
}

bool has_reason(const TtpClassification& c, std::string_view code) {
    return std::find(c.rationale.begin(), c.rationale.end(), code) != c.rationale.end();
}

} // namespace

TEST_CASE("FIN7 hypervisor exclusion: the ESXi ransomware is excluded, its siblings become plausible") {
    const auto f = testing::load_fixture("fin7");
    const auto g = build_graph(f.kb, f.cti, f.landscape);
    const auto list = classify_ttps(g, f.kb, f.cti, f.landscape);
    const auto c = by_id(list);

    REQUIRE(list.size() == 6);
    CHECK(c.at("T1566.001").cls == TtpClass::Probable);
    CHECK(c.at("T1566.001").sphere == Sphere::Risk);

    CHECK(c.at("T1486").cls == TtpClass::Excluded);
    CHECK(has_reason(c.at("T1486"), reason::kLandscapeExclusion));

    CHECK(c.at("T1490").cls == TtpClass::Plausible);
    CHECK(c.at("T1490").sphere == Sphere::Uncertainty);
    CHECK(has_reason(c.at("T1490"), reason::kTacticSibling));

    CHECK(c.at("T1489").cls == TtpClass::Plausible);
    CHECK(has_reason(c.at("T1489"), reason::kAnalystAdaptation));

    // Linux-only shell against a Windows estate: never capable here.
    CHECK(c.at("T1059.004").cls == TtpClass::Excluded);
    CHECK(has_reason(c.at("T1059.004"), reason::kNoPlatformMatch));
    // Shares the execution tactic with the evidenced (but blocked) shell.
    CHECK(c.at("T1047").cls == TtpClass::Plausible);
}

TEST_CASE("evidence at 5 with a matching platform is probable") {
    kb::KnowledgeBase kb;
    kb.add(kb::TechniqueRecord{"T1", "", {"TA1"}, std::nullopt, {"Windows"}, {}, "", nlohmann::json::object()});
    kb.add(kb::TechniqueRecord{"T2", "", {"TA1"}, std::nullopt, {"Windows"}, {}, "", nlohmann::json::object()});
    kb.add(kb::TechniqueRecord{"T3", "", {"TA9"}, std::nullopt, {"Windows"}, {}, "", nlohmann::json::object()});
    LandscapeInventory land;
    land.assets = {{"ws", "", {"windows"}, Zone::Internal, {}}};
    CtiReport cti;
    cti.evidence = {{"T1", 5, 3, "", {}, {}}, {"T3", 2, 3, "", {}, {}}};
    cti.adaptations = {};
    GraphOptions options;
    options.expand_tactic_siblings = true;
    const auto g = build_graph(kb, cti, land, options);
    const auto c = by_id(classify_ttps(g, kb, cti, land));
    CHECK(c.at("T1").cls == TtpClass::Probable);
    // Pulled in as a tactic sibling with no evidence at all.
    CHECK(c.at("T2").cls == TtpClass::Plausible);
    CHECK(c.at("T3").cls == TtpClass::PossibleOnly);
    CHECK(c.at("T3").sphere == Sphere::Uncertainty);

    SUBCASE("threshold is configurable") {
        const auto strict = by_id(classify_ttps(g, kb, cti, land, {2}));
        CHECK(strict.at("T3").cls == TtpClass::Probable);
    }
}

TEST_CASE("classification JSON round trip and class names") {
    const auto f = testing::load_fixture("fin7");
    const auto g = build_graph(f.kb, f.cti, f.landscape);
    for (const auto& c : classify_ttps(g, f.kb, f.cti, f.landscape)) CHECK(parse_classification(to_json(c)) == c);
    CHECK(to_string(TtpClass::PossibleOnly) == "possible");
    CHECK(parse_ttp_class("excluded") == TtpClass::Excluded);
}
