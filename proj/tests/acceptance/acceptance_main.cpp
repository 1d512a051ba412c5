// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors
//
// Acceptance checks. One PASS/FAIL line per criterion; exit status 1 when any
// criterion fails.

#include <httplib.h>

#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "fixtures.hpp"
#include "generators.hpp"
#include "tibsa/error.hpp"
#include "tibsa/gateway/cli.hpp"
#include "tibsa/gateway/http_service.hpp"
#include "tibsa/gateway/workspace.hpp"
#include "tibsa/register.hpp"

using namespace tibsa;
namespace eff = tibsa::effectiveness;
using nlohmann::json;

namespace {

/// Collects failure details; a criterion passes when none were recorded.
struct Check {
    std::vector<std::string> failures;

    void expect(bool ok, const std::string& what) {
        if (!ok && failures.size() < 5) failures.push_back(what);
    }
};

// Scores typed in from the foundation table, kept apart from the engine's copy.
const std::map<std::string, std::array<int, 3>> kReferenceScores = {
    {"PR", {8, 10, 12}}, {"DT", {4, 6, 8}}, {"CS", {3, 5, 7}}, {"RE", {1, 3, 5}}};

const std::array<eff::Level, 3> kLevels{eff::Level::Low, eff::Level::Medium, eff::Level::High};

void score_grid(Check& c) {
    for (const auto& [code, scores] : kReferenceScores) {
        for (std::size_t i = 0; i < 3; ++i) {
            const int got = eff::mitigation_score(eff::Criterion(code), kLevels[i]);
            c.expect(got == scores[i], code + "." + eff::level_letter(kLevels[i]) + " = " + std::to_string(got));
        }
    }
}

void ratio_ranking(Check& c) {
    const std::vector<std::tuple<std::string, int, double, std::string>> rows{
        {"ST7.C098", 12, 1, "12"}, {"ST6.C121", 11, 1, "11"}, {"ST1.C007", 18, 2, "9"}, {"ST5.C051", 16, 2, "8"},
        {"ST9.C101", 16, 3, "5.3"}, {"ST5.C054", 10, 4, "2.5"}, {"ST3.C038", 7, 3, "2.3"}};
    std::vector<eff::ControlEvaluation> evals;
    for (const auto& [id, benefit, cost, display] : rows) {
        evals.push_back({id, benefit, cost, eff::bc_ratio(benefit, cost)});
    }
    std::mt19937 rng(3);
    for (int round = 0; round < 20; ++round) {
        auto shuffled = evals;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const auto ranked = eff::rank_controls(shuffled);
        c.expect(ranked.size() == rows.size(), "ranking dropped controls");
        for (std::size_t i = 0; i < ranked.size() && i < rows.size(); ++i) {
            c.expect(ranked[i].control_id == std::get<0>(rows[i]), "row " + std::to_string(i + 1) + " is " +
                                                                       ranked[i].control_id);
            c.expect(ranked[i].display_ratio() == std::get<3>(rows[i]),
                     ranked[i].control_id + " displays " + ranked[i].display_ratio());
        }
    }
    // The constructed inventory must evaluate to the same pairs.
    const auto f = testing::load_fixture("ranking");
    const auto from_inventory = eff::evaluate_controls(f.controls.controls, f.controls.entries);
    c.expect(from_inventory.size() == rows.size(), "inventory evaluation size");
    for (std::size_t i = 0; i < from_inventory.size() && i < rows.size(); ++i) {
        c.expect(from_inventory[i].control_id == std::get<0>(rows[i]) &&
                     from_inventory[i].benefit == std::get<1>(rows[i]) && from_inventory[i].cost == std::get<2>(rows[i]),
                 "inventory row " + std::to_string(i + 1) + " is " + from_inventory[i].control_id);
    }
}

void benefit_oracle(Check& c) {
    std::mt19937 rng(2026);
    const std::vector<std::string> codes{"PR", "DT", "CS", "RE"};
    std::uniform_int_distribution<int> n_ttps(0, 6), coin(0, 2), lvl(0, 2);
    for (int round = 0; round < 1000; ++round) {
        std::vector<eff::MitigationEntry> entries;
        int expected = 0;
        const int ttps = n_ttps(rng);
        for (int t = 0; t < ttps; ++t) {
            for (const auto& code : codes) {
                if (coin(rng) != 0) continue;
                const int l = lvl(rng);
                entries.push_back({"C", "T" + std::to_string(t), eff::Criterion(code), kLevels[l]});
                expected += kReferenceScores.at(code)[l];
            }
        }
        std::shuffle(entries.begin(), entries.end(), rng);
        const int got = eff::control_benefit(entries);
        c.expect(got == expected, "round " + std::to_string(round) + ": " + std::to_string(got) +
                                      " != " + std::to_string(expected));
    }
}

bool oracle_valid(const std::map<std::string, std::array<int, 3>>& table) {
    for (const auto& [code, s] : table) {
        if (!(s[0] < s[1] && s[1] < s[2]) || s[0] < 0) return false;
    }
    const std::vector<std::string> chain{"PR", "DT", "CS", "RE"};
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        for (std::size_t l = 0; l < 3; ++l) {
            if (table.at(chain[i])[l] < table.at(chain[i + 1])[l]) return false;
        }
    }
    return true;
}

void matrix_invariants(Check& c) {
    c.expect(eff::ScoreMatrix::defaults().check_invariants().empty(), "default matrix has findings");
    std::mt19937 rng(77);
    std::uniform_int_distribution<int> pick(0, 3), score(0, 14);
    const std::vector<std::string> codes{"PR", "DT", "CS", "RE"};
    int accepted = 0, rejected = 0;
    for (int round = 0; round < 300; ++round) {
        auto table = kReferenceScores;
        const std::string code = codes[static_cast<std::size_t>(pick(rng))];
        std::array<int, 3> s{score(rng), score(rng), score(rng)};
        if (round % 2 == 0) std::sort(s.begin(), s.end());
        table[code] = s;
        const json config = {{"schema_version", "1"},
                             {"criteria", json::array({{{"code", code}, {"scores", {{"L", s[0]}, {"M", s[1]}, {"H", s[2]}}}}})}};
        const bool valid = oracle_valid(table);
        try {
            const auto m = eff::ScoreMatrix::from_config(config);
            ++accepted;
            c.expect(valid, "accepted invalid config for " + code + " " + config.dump());
            c.expect(m.check_invariants().empty(), "accepted matrix has findings");
        } catch (const ValidationError& e) {
            ++rejected;
            c.expect(!valid, "rejected valid config " + config.dump());
            const std::string msg = e.what();
            c.expect(msg.find("monotonicity") != std::string::npos || msg.find("dominance") != std::string::npos ||
                         msg.find("negative") != std::string::npos,
                     "unclear rejection: " + msg);
        }
    }
    c.expect(accepted > 0 && rejected > 0, "random configs did not exercise both outcomes");
    // An extra criterion must still respect monotonicity.
    const json extra = {{"schema_version", "1"},
                        {"criteria", json::array({{{"code", "DC"}, {"scores", {{"L", 3}, {"M", 2}, {"H", 1}}}}})}};
    bool threw = false;
    try {
        eff::ScoreMatrix::from_config(extra);
    } catch (const ValidationError&) {
        threw = true;
    }
    c.expect(threw, "non-monotone extra criterion accepted");
}

void paradox(Check& c) {
    const auto a = testing::evaluated_assessment("paradox");
    registry::Change block;
    block.kind = registry::Change::Kind::AddControl;
    block.control = {"C-BLOCK", "block", {1, 0, 0}};
    block.entries = {{"C-BLOCK", "T1566.001", eff::Criterion::prevent(), eff::Level::High}};
    for (int run = 0; run < 3; ++run) {
        const auto r = registry::whatif(a, std::vector<registry::Change>{block});
        c.expect(r.replan.paradox, "PREVENT-High alone did not raise the paradox");
        auto covered = block;
        covered.entries.push_back({"C-BLOCK", "T1490", eff::Criterion::detect(), eff::Level::High});
        const auto r2 = registry::whatif(a, std::vector<registry::Change>{covered});
        c.expect(!r2.replan.paradox, "DETECT-High on the alternate path left the paradox");
    }
}

int class_rank(graph::TtpClass cls) {
    switch (cls) {
    case graph::TtpClass::Excluded: return 0;
    case graph::TtpClass::PossibleOnly: return 1;
    case graph::TtpClass::Plausible: return 2;
    case graph::TtpClass::Probable: return 3;
    }
    return 0;
}

void classification(Check& c) {
    std::mt19937 rng(500);
    for (int round = 0; round < 500; ++round) {
        auto s = testing::random_scenario(rng);
        const auto g = graph::build_graph(s.kb, s.cti, s.landscape);
        const auto classes = graph::classify_ttps(g, s.kb, s.cti, s.landscape);
        std::map<std::string, graph::TtpClass> by_id;
        for (const auto& k : classes) by_id[k.ttp_id] = k.cls;
        for (const auto& k : classes) c.expect(k.sphere == graph::sphere_for(k.cls), k.ttp_id + " has the wrong sphere");
        std::set<std::string> probable, plausible, possible;
        for (const auto& k : classes) {
            if (k.cls != graph::TtpClass::Excluded) possible.insert(k.ttp_id);
            if (k.cls == graph::TtpClass::Probable) probable.insert(k.ttp_id);
            if (k.cls == graph::TtpClass::Plausible) plausible.insert(k.ttp_id);
        }
        for (const auto& id : probable) {
            c.expect(possible.contains(id), id + " probable but not possible");
            c.expect(!plausible.contains(id), id + " both probable and plausible");
        }

        // Raising one evidence level never lowers any class.
        if (!s.cti.evidence.empty()) {
            auto raised = s.cti;
            auto& e = raised.evidence[static_cast<std::size_t>(round) % raised.evidence.size()];
            if (e.evidence_level < 5) ++e.evidence_level;
            const auto g2 = graph::build_graph(s.kb, raised, s.landscape);
            for (const auto& k : graph::classify_ttps(g2, s.kb, raised, s.landscape)) {
                c.expect(class_rank(k.cls) >= class_rank(by_id.at(k.ttp_id)),
                         "raising evidence lowered " + k.ttp_id + " in round " + std::to_string(round));
            }
        }

        registry::CreateOptions options;
        options.clock = testing::fixed_clock();
        const auto full = registry::create_assessment("F", registry::Mode::Full, s.kb, s.cti, s.landscape,
                                                      scoring::default_rubric(), options);
        const auto rapid = registry::create_assessment("R", registry::Mode::Rapid, s.kb, s.cti, s.landscape,
                                                       scoring::default_rubric(), options);
        c.expect(std::includes(full.scoped_ttps.begin(), full.scoped_ttps.end(), rapid.scoped_ttps.begin(),
                               rapid.scoped_ttps.end()),
                 "rapid scope not within full scope in round " + std::to_string(round));
    }
}

void diamond(Check& c) {
    const auto f = testing::load_fixture("diamond");
    const auto g = graph::build_graph(f.kb, f.cti, f.landscape);
    const auto dag = graph::enumerate_paths(g, "goal:G", graph::kDefaultMaxDepth, f.landscape).size();
    const auto tree =
        graph::enumerate_paths(graph::tree_restriction(g), "goal:G", graph::kDefaultMaxDepth, f.landscape).size();
    c.expect(dag > tree, "graph paths " + std::to_string(dag) + " <= tree paths " + std::to_string(tree));
}

void aggregation(Check& c) {
    std::mt19937 rng(88);
    std::uniform_int_distribution<int> v(1, 5), n(1, 4), w(0, 3), k(2, 6);
    const auto rubric = scoring::default_rubric();
    auto scores_for = [&](const std::string& ttp, int count) {
        std::vector<scoring::AssessorScore> out;
        for (int i = 0; i < count; ++i) {
            scoring::AssessorScore s{"a" + std::to_string(i), ttp, {}};
            for (const auto& cr : rubric.criteria) s.values[cr.id] = v(rng);
            out.push_back(std::move(s));
        }
        return out;
    };
    for (int round = 0; round < 200; ++round) {
        auto weighted = rubric;
        for (auto& cr : weighted.criteria) cr.weight = w(rng);
        auto scaled = weighted;
        const int factor = k(rng);
        for (auto& cr : scaled.criteria) cr.weight *= factor;
        std::vector<scoring::AggregatedScore> base, big;
        for (int t = 0; t < 5; ++t) {
            const int count = 1 << (n(rng) - 1); // 1, 2, 4, 8 keep means exact
            const auto scores = scores_for("T" + std::to_string(t), count);
            const auto agg = scoring::aggregate(weighted, scores);
            const auto agg_big = scoring::aggregate(scaled, scores);
            c.expect(agg_big.weighted_total == agg.weighted_total * factor, "weighted total not linear");
            for (const auto& cr : rubric.criteria) {
                int lo = 5, hi = 1;
                for (const auto& s : scores) {
                    lo = std::min(lo, s.values.at(cr.id));
                    hi = std::max(hi, s.values.at(cr.id));
                }
                const auto& pc = agg.per_criterion.at(cr.id);
                c.expect(pc.mean >= lo && pc.mean <= hi, "mean outside [min,max] for " + cr.id);
                c.expect(agg.divergence_flags.contains(cr.id) == (hi - lo >= 3), "divergence flag wrong for " + cr.id);
            }
            base.push_back(agg);
            big.push_back(agg_big);
        }
        const auto r1 = scoring::rank_ttps(base);
        const auto r2 = scoring::rank_ttps(big);
        for (std::size_t i = 0; i < r1.size(); ++i) c.expect(r1[i].ttp_id == r2[i].ttp_id, "rank changed under scaling");
    }
}

void determinism(Check& c) {
    auto a = testing::evaluated_assessment("ranking");
    auto b = a;
    registry::run_pipeline(b, testing::fixed_clock("2027-06-01T00:00:00Z"));
    c.expect(registry::content_hash(a) == registry::content_hash(b), "rerunning the pipeline changed the hash");
    c.expect(registry::content_hash(a) == registry::content_hash(testing::evaluated_assessment("ranking")),
             "fresh pipeline run differs");

    std::mt19937 rng(100);
    const auto dir = std::filesystem::temp_directory_path() / "tibsa-acceptance-register";
    std::filesystem::create_directories(dir);
    for (int round = 0; round < 100; ++round) {
        const auto r = testing::random_register(rng);
        const auto path = dir / "register.json";
        registry::save_register(r, path);
        const auto back = registry::load_register(path);
        c.expect(back == r, "register round trip " + std::to_string(round));
        c.expect(registry::serialize_register(back) == registry::serialize_register(r),
                 "register bytes differ " + std::to_string(round));
    }
    std::filesystem::remove_all(dir);

    const auto before = registry::to_json(a);
    registry::Change remove;
    remove.kind = registry::Change::Kind::RemoveControl;
    remove.control_id = a.controls.front().id;
    registry::whatif(a, std::vector<registry::Change>{remove});
    registry::whatif(a, {});
    c.expect(registry::to_json(a) == before, "what-if mutated the assessment");
}

json create_request(const std::string& id) {
    return {{"id", id},
            {"catalogs", json::array({{{"kind", "techniques"},
                                       {"document", testing::read_text(testing::fixture_path("ranking", "techniques.json"))}}})},
            {"cti", testing::read_json("ranking", "cti.json")},
            {"landscape", testing::read_json("ranking", "landscape.json")}};
}

void interfaces(Check& c) {
    const auto dir = std::filesystem::temp_directory_path() / "tibsa-acceptance-cli";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const std::string reg = (dir / "register.json").string();
    const auto env = [](const char*) -> std::optional<std::string> { return std::nullopt; };
    auto cli = [&](std::vector<std::string> args) {
        args.insert(args.begin(), {"--register", reg});
        std::ostringstream out, err;
        const int code = gateway::run_cli(args, out, err, env, testing::fixed_clock());
        c.expect(code == 0, "cli exit " + std::to_string(code) + ": " + err.str());
        return out.str();
    };
    auto fx = [](const char* file) { return testing::fixture_path("ranking", file).string(); };
    cli({"create", "--id", "t3", "--catalog", std::string("techniques=") + fx("techniques.json"), "--cti",
         fx("cti.json"), "--landscape", fx("landscape.json")});
    cli({"score", "submit", "--assessment", "t3", "--scores", fx("scores.json")});
    const auto evaluated = json::parse(cli({"evaluate", "--assessment", "t3", "--controls", fx("controls.json")}));
    const auto cli_controls = json::parse(cli({"rank", "--assessment", "t3", "--of", "controls"}));
    const auto cli_ttps = json::parse(cli({"rank", "--assessment", "t3", "--of", "ttps"}));
    std::filesystem::remove_all(dir);
    c.expect(evaluated.at("ranking") == cli_controls.at("ranking"), "cli evaluate and rank disagree");

    gateway::Workspace ws(gateway::GatewayConfig{}, testing::fixed_clock());
    gateway::HttpService service(ws);
    const int port = service.bind("127.0.0.1", 0);
    if (port <= 0) {
        c.expect(false, "could not bind a port");
        return;
    }
    std::thread server([&] { service.listen(); });
    service.server().wait_until_ready();
    httplib::Client client("127.0.0.1", port);
    auto post = [&](const std::string& path, const json& body) {
        auto res = client.Post(path, body.dump(), "application/json");
        c.expect(res && res->status / 100 == 2, "POST " + path + " failed");
        return res ? json::parse(res->body) : json();
    };
    auto get = [&](const std::string& path) {
        auto res = client.Get(path);
        c.expect(res && res->status == 200, "GET " + path + " failed");
        return res ? json::parse(res->body) : json();
    };
    post("/assessments", create_request("t3"));
    post("/assessments/t3/scores", testing::read_json("ranking", "scores.json"));
    const auto http_eval = post("/assessments/t3/evaluate", {{"controls", testing::read_json("ranking", "controls.json")}});
    const auto http_controls = get("/assessments/t3/controls/ranking");
    const auto http_ttps = get("/assessments/t3/ranking");
    service.stop();
    server.join();

    c.expect(http_eval.value("ranking", json()) == evaluated.at("ranking"), "evaluate rankings differ");
    c.expect(http_controls.value("ranking", json()) == cli_controls.at("ranking"), "control rankings differ");
    c.expect(http_ttps.value("ranking", json()) == cli_ttps.at("ranking"), "ttp rankings differ");
    c.expect(http_eval.value("content_hash", "") == evaluated.at("content_hash"), "content hashes differ");
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
        {"score-grid-fidelity", score_grid},
        {"ratio-ranking-fidelity", ratio_ranking},
        {"benefit-rule-oracle", benefit_oracle},
        {"matrix-invariants", matrix_invariants},
        {"risk-paradox", paradox},
        {"classification-properties", classification},
        {"multi-parent-witness", diamond},
        {"aggregation-properties", aggregation},
        {"determinism-persistence", determinism},
        {"cli-http-consistency", interfaces},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Check c;
        try {
            run(c);
        } catch (const std::exception& e) {
            c.failures.push_back(std::string("exception: ") + e.what());
        }
        if (c.failures.empty()) {
            std::cout << "PASS " << name << "\n";
        } else {
            ++failed;
            std::cout << "FAIL " << name << ": " << c.failures.front();
            for (std::size_t i = 1; i < c.failures.size(); ++i) std::cout << "; " << c.failures[i];
            std::cout << "\n";
        }
    }
    return failed == 0 ? 0 : 1;
}
