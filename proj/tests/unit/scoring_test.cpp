// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors

#include <doctest.h>

#include <random>

#include "tibsa/error.hpp"
#include "tibsa/scoring.hpp"

using namespace tibsa;
using namespace tibsa::scoring;

namespace {

AssessorScore uniform(const std::string& assessor, const std::string& ttp, int value) {
    AssessorScore s{assessor, ttp, {}};
    for (const auto& c : default_rubric().criteria) s.values[c.id] = value;
    return s;
}

std::vector<AssessorScore> random_scores(std::mt19937& rng, const Rubric& rubric, const std::string& ttp, int n) {
    std::uniform_int_distribution<int> v(1, 5);
    std::vector<AssessorScore> out;
    for (int i = 0; i < n; ++i) {
        AssessorScore s{"assessor-" + std::to_string(i), ttp, {}};
        for (const auto& c : rubric.criteria) s.values[c.id] = v(rng);
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace

TEST_CASE("default rubric: eight criteria in row order, unit weights") {
    const auto r = default_rubric();
    REQUIRE(r.criteria.size() == 8);
    const std::vector<std::string_view> order{criteria::kEvidence,       criteria::kSkillRequired,
                                              criteria::kApplicability,  criteria::kPositioningEffect,
                                              criteria::kRecoveryTime,   criteria::kRestoreCost,
                                              criteria::kDetectability,  criteria::kGraphConfidence};
    for (std::size_t i = 0; i < order.size(); ++i) {
        CHECK(r.criteria[i].id == order[i]);
        CHECK(r.criteria[i].weight == 1.0);
    }
    CHECK(r.criteria[0].anchors[2] == "Confirmed evidence of TTP in at least one knowledge base");
    CHECK(r.criteria[7].anchors[0] == "Extreme uncertainty");
    CHECK(r.criteria[7].anchors[4] == "Extreme Certainty");
    CHECK_NOTHROW(r.validate());
    CHECK(parse_rubric(to_json(r)) == r);
}

TEST_CASE("rubric validation") {
    Rubric r;
    CHECK_THROWS_AS(r.validate(), ValidationError);
    r.criteria = {{"a", "", {}, 1.0}, {"a", "", {}, -1.0}};
    try {
        r.validate();
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.findings().size() == 2);
    }
}

TEST_CASE("validate_score findings") {
    const auto rubric = default_rubric();
    CHECK(validate_score(rubric, uniform("a", "T1", 3)).empty());

    auto high = uniform("a", "T1", 3);
    high.values["detectability"] = 6;
    const auto f = validate_score(rubric, high);
    REQUIRE(f.size() == 1);
    CHECK(f[0].kind == ScoreFinding::Kind::OutOfRange);
    CHECK(f[0].criterion_id == "detectability");
    CHECK(f[0].message.find("detectability") != std::string::npos);

    auto missing = uniform("a", "T1", 3);
    missing.values.erase("evidence");
    REQUIRE(validate_score(rubric, missing).size() == 1);
    CHECK(validate_score(rubric, missing)[0].kind == ScoreFinding::Kind::Missing);

    auto extra = uniform("a", "T1", 3);
    extra.values["vibes"] = 5;
    CHECK(validate_score(rubric, extra)[0].kind == ScoreFinding::Kind::Unknown);
}

TEST_CASE("aggregate boundary cases") {
    const auto rubric = default_rubric();
    const std::vector<AssessorScore> ones{uniform("a", "T1", 1)};
    const auto low = aggregate(rubric, ones);
    CHECK(low.weighted_total == 8);
    CHECK(low.divergence_flags.empty());

    const std::vector<AssessorScore> fives{uniform("a", "T1", 5)};
    CHECK(aggregate(rubric, fives).weighted_total == 40);

    auto a = uniform("a", "T1", 3);
    auto b = uniform("b", "T1", 3);
    a.values["evidence"] = 1;
    b.values["evidence"] = 5;
    const std::vector<AssessorScore> split{a, b};
    const auto agg = aggregate(rubric, split);
    CHECK(agg.per_criterion.at("evidence").mean == 3);
    CHECK(agg.per_criterion.at("evidence").range() == 4);
    CHECK(agg.divergence_flags == std::set<std::string>{"evidence"});
    CHECK(agg.assessor_count == 2);
}

TEST_CASE("aggregate rejects empty, mixed and invalid input") {
    const auto rubric = default_rubric();
    CHECK_THROWS_AS(aggregate(rubric, std::vector<AssessorScore>{}), ValidationError);
    const std::vector<AssessorScore> mixed{uniform("a", "T1", 3), uniform("b", "T2", 3)};
    CHECK_THROWS_AS(aggregate(rubric, mixed), ValidationError);
    const std::vector<AssessorScore> bad{uniform("a", "T1", 0)};
    CHECK_THROWS_AS(aggregate(rubric, bad), ValidationError);
}

TEST_CASE("divergence flag fires exactly at the threshold") {
    const auto rubric = default_rubric();
    for (int spread = 0; spread <= 4; ++spread) {
        auto a = uniform("a", "T1", 1);
        auto b = uniform("b", "T1", 1);
        b.values["skill-required"] = 1 + spread;
        const std::vector<AssessorScore> pair{a, b};
        CHECK(aggregate(rubric, pair).divergence_flags.contains("skill-required") == (spread >= 3));
        CHECK(aggregate(rubric, pair, {2}).divergence_flags.contains("skill-required") == (spread >= 2));
    }
}

TEST_CASE("aggregate of identical scores equals a single score bar the count") {
    const auto rubric = default_rubric();
    std::mt19937 rng(5);
    for (int i = 0; i < 50; ++i) {
        const auto one = random_scores(rng, rubric, "T1", 1);
        std::vector<AssessorScore> many(4, one[0]);
        auto single = aggregate(rubric, one);
        auto repeated = aggregate(rubric, many);
        CHECK(repeated.assessor_count == 4);
        repeated.assessor_count = 1;
        CHECK(repeated == single);
    }
}

TEST_CASE("mean stays within assessor min and max") {
    const auto rubric = default_rubric();
    std::mt19937 rng(9);
    std::uniform_int_distribution<int> n(1, 6);
    for (int i = 0; i < 300; ++i) {
        const auto scores = random_scores(rng, rubric, "T1", n(rng));
        const auto agg = aggregate(rubric, scores);
        for (const auto& c : rubric.criteria) {
            int lo = 5, hi = 1;
            for (const auto& s : scores) {
                lo = std::min(lo, s.values.at(c.id));
                hi = std::max(hi, s.values.at(c.id));
            }
            const auto& pc = agg.per_criterion.at(c.id);
            CHECK(pc.min == lo);
            CHECK(pc.max == hi);
            CHECK(pc.mean >= lo);
            CHECK(pc.mean <= hi);
        }
    }
}

TEST_CASE("weighted total scales linearly and ranking survives scaling") {
    std::mt19937 rng(21);
    std::uniform_int_distribution<int> w(0, 3), k(2, 6), pick(0, 2);
    const int sizes[] = {1, 2, 4}; // dyadic means keep the arithmetic exact
    for (int round = 0; round < 100; ++round) {
        auto rubric = default_rubric();
        for (auto& c : rubric.criteria) c.weight = w(rng);
        auto scaled = rubric;
        const int factor = k(rng);
        for (auto& c : scaled.criteria) c.weight *= factor;

        std::vector<AggregatedScore> base, big;
        for (int t = 0; t < 6; ++t) {
            const auto scores = random_scores(rng, rubric, "T" + std::to_string(t), sizes[pick(rng)]);
            base.push_back(aggregate(rubric, scores));
            big.push_back(aggregate(scaled, scores));
            CHECK(big.back().weighted_total == base.back().weighted_total * factor);
        }
        const auto r1 = rank_ttps(base);
        const auto r2 = rank_ttps(big);
        for (std::size_t i = 0; i < r1.size(); ++i) CHECK(r1[i].ttp_id == r2[i].ttp_id);
    }
}

TEST_CASE("rank_ttps ordering and tie-breaks") {
    auto make = [](std::string id, double total, double confidence) {
        AggregatedScore a;
        a.ttp_id = std::move(id);
        a.weighted_total = total;
        a.per_criterion[std::string(criteria::kGraphConfidence)] = {confidence, 1, 5};
        return a;
    };
    auto ids = [](const std::vector<AggregatedScore>& list) {
        std::vector<std::string> out;
        for (const auto& a : list) out.push_back(a.ttp_id);
        return out;
    };
    CHECK(ids(rank_ttps({make("c", 10, 1), make("a", 30, 1), make("b", 20, 1)})) ==
          std::vector<std::string>{"a", "b", "c"});
    CHECK(ids(rank_ttps({make("low", 20, 2), make("high", 20, 4)})) == std::vector<std::string>{"high", "low"});
    CHECK(ids(rank_ttps({make("b", 20, 3), make("a", 20, 3)})) == std::vector<std::string>{"a", "b"});

    std::vector<AggregatedScore> input{make("t1", 12, 3), make("t2", 12, 3), make("t3", 15, 1), make("t4", 12, 4),
                                       make("t5", 9, 5)};
    const auto expected = rank_ttps(input);
    std::mt19937 rng(3);
    for (int i = 0; i < 50; ++i) {
        std::shuffle(input.begin(), input.end(), rng);
        CHECK(rank_ttps(input) == expected);
    }
}

TEST_CASE("score and aggregate JSON round trip") {
    const auto s = uniform("a", "T1", 4);
    CHECK(parse_score(to_json(s)) == s);
    const std::vector<AssessorScore> list{s, uniform("b", "T1", 2)};
    const auto agg = aggregate(default_rubric(), list);
    CHECK(parse_aggregate(to_json(agg)) == agg);
    CHECK_THROWS_AS(parse_score(nlohmann::json{{"ttp_id", "T1"}}), ParseError);
}
