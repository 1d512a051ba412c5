// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors

#include "tibsa/scoring.hpp"

#include <algorithm>

#include "tibsa/error.hpp"

namespace tibsa::scoring {

using nlohmann::json;

const CriterionDef* Rubric::find(std::string_view id) const {
    auto it = std::find_if(criteria.begin(), criteria.end(), [&](const CriterionDef& c) { return c.id == id; });
    return it == criteria.end() ? nullptr : &*it;
}

void Rubric::validate() const {
    std::vector<std::string> findings;
    if (criteria.empty()) findings.emplace_back("rubric has no criteria");
    std::set<std::string> ids;
    for (const auto& c : criteria) {
        if (c.id.empty()) findings.emplace_back("criterion with empty id");
        if (!ids.insert(c.id).second) findings.push_back("duplicate criterion id '" + c.id + "'");
        if (!(c.weight >= 0)) findings.push_back("criterion '" + c.id + "' has negative weight");
    }
    if (!findings.empty()) throw ValidationError(std::move(findings));
}

Rubric default_rubric() {
    Rubric r;
    r.version = "default-1";
    r.criteria = {
        {std::string(criteria::kEvidence),
         "Is there evidence of this TTP in a reputable adversary knowledge base?",
         {"No evidence of TTP", "Scattered information / possible use of TTP",
          "Confirmed evidence of TTP in at least one knowledge base",
          "Confirmed evidence of TTP plus frequent use reported",
          "Confirmed evidence of TTP plus widespread use reported"},
         1.0},
        {std::string(criteria::kSkillRequired),
         "What is the level of skill required to apply this TTP?",
         {"Advanced skills and specific knowledge on the targeted system", "Advanced skills on the targeted asset",
          "Some skills on the targeted asset", "General technical skills", "No specific skills required"},
         1.0},
        {std::string(criteria::kApplicability),
         "What is this TTP's applicability?",
         {"Single asset", "Small number of assets system in isolated zone with monitored internet access",
          "Entire ecosystem", "A system of systems", "A significant portion of IT landscape"},
         1.0},
        {std::string(criteria::kPositioningEffect),
         "What is the positioning effect of this TTP?",
         {"General non-segmented, non-monitored network with internet access",
          "General non-segmented network with internet access", "General segment with internet access",
          "Isolated zone with internet access", "Isolated zone with no internet access"},
         1.0},
        {std::string(criteria::kRecoveryTime),
         "How long would it take to recover from this TTP once detected?",
         {"<8 hours", "8-16 hours", "17-37 hours", "38-52 hours", "> 52 hours"},
         1.0},
        {std::string(criteria::kRestoreCost),
         "What is the estimated cost to restore or replace the impacted asset?",
         {"< 10k \xE2\x82\xAC", "25k \xE2\x82\xAC", "50k \xE2\x82\xAC", "75k \xE2\x82\xAC", "> 100k \xE2\x82\xAC"},
         1.0},
        {std::string(criteria::kDetectability),
         "How detectable is this TTP when applied?",
         {"TTP obvious without monitoring", "Detection likely with routine monitoring",
          "Detection likely with simple refinements of detection methods",
          "Detection possible with newly introduced detection methods", "Undetectable"},
         1.0},
        {std::string(criteria::kGraphConfidence),
         "What is this TTPs confidence level assigned in causal graph?",
         {"Extreme uncertainty", "Large uncertainty", "Certainty", "Large certainty", "Extreme Certainty"},
         1.0},
    };
    return r;
}

Rubric parse_rubric(const json& doc) {
    if (!doc.is_object()) throw ParseError("document", "expected a JSON object");
    if (doc.value("schema_version", std::string{}) != "1") throw VersionError("unsupported rubric schema_version");
    if (!doc.contains("criteria") || !doc["criteria"].is_array()) throw ParseError("criteria", "missing or not an array");
    Rubric r;
    r.version = doc.value("version", "");
    const auto& list = doc["criteria"];
    for (std::size_t i = 0; i < list.size(); ++i) {
        const auto& c = list[i];
        const std::string where = "criteria[" + std::to_string(i) + "]";
        if (!c.is_object() || !c.contains("id") || !c["id"].is_string()) throw ParseError(where + ".id", "missing id");
        CriterionDef def;
        def.id = c["id"].get<std::string>();
        def.question = c.value("question", "");
        const auto anchors = c.value("anchors", json::array());
        if (!anchors.is_array() || anchors.size() != 5) throw ParseError(where + ".anchors", "exactly 5 anchors required");
        for (std::size_t a = 0; a < 5; ++a) {
            if (!anchors[a].is_string()) throw ParseError(where + ".anchors[" + std::to_string(a) + "]", "expected a string");
            def.anchors[a] = anchors[a].get<std::string>();
        }
        const auto weight = c.value("weight", json(1.0));
        if (!weight.is_number()) throw ParseError(where + ".weight", "expected a number");
        def.weight = weight.get<double>();
        r.criteria.push_back(std::move(def));
    }
    r.validate();
    return r;
}

json to_json(const Rubric& rubric) {
    json list = json::array();
    for (const auto& c : rubric.criteria) {
        list.push_back({{"id", c.id}, {"question", c.question}, {"anchors", c.anchors}, {"weight", c.weight}});
    }
    return {{"schema_version", "1"}, {"version", rubric.version}, {"criteria", list}};
}

std::vector<ScoreFinding> validate_score(const Rubric& rubric, const AssessorScore& score) {
    std::vector<ScoreFinding> findings;
    for (const auto& c : rubric.criteria) {
        auto it = score.values.find(c.id);
        if (it == score.values.end()) {
            findings.push_back({ScoreFinding::Kind::Missing, c.id, "criterion '" + c.id + "' has no value"});
        } else if (it->second < 1 || it->second > 5) {
            findings.push_back({ScoreFinding::Kind::OutOfRange, c.id,
                                "criterion '" + c.id + "' value " + std::to_string(it->second) +
                                    " outside [1,5]"});
        }
    }
    for (const auto& [id, value] : score.values) {
        if (rubric.find(id) == nullptr) {
            findings.push_back({ScoreFinding::Kind::Unknown, id, "criterion '" + id + "' is not in the rubric"});
        }
    }
    return findings;
}

double AggregatedScore::mean(std::string_view criterion_id) const {
    auto it = per_criterion.find(std::string(criterion_id));
    return it == per_criterion.end() ? 0.0 : it->second.mean;
}

AggregatedScore aggregate(const Rubric& rubric, std::span<const AssessorScore> scores,
                          const AggregateOptions& options) {
    if (scores.empty()) throw ValidationError("aggregate needs at least one assessor score");
    std::vector<std::string> findings;
    for (const auto& s : scores) {
        if (s.ttp_id != scores.front().ttp_id) {
            findings.push_back("mixed ttp ids in aggregate: '" + scores.front().ttp_id + "' and '" + s.ttp_id + "'");
        }
        for (const auto& f : validate_score(rubric, s)) findings.push_back(s.assessor_id + ": " + f.message);
    }
    if (!findings.empty()) throw ValidationError(std::move(findings));

    AggregatedScore out;
    out.ttp_id = scores.front().ttp_id;
    out.assessor_count = static_cast<int>(scores.size());
    for (const auto& c : rubric.criteria) {
        CriterionAggregate agg;
        agg.min = 5;
        agg.max = 1;
        long sum = 0;
        for (const auto& s : scores) {
            const int v = s.values.at(c.id);
            sum += v;
            agg.min = std::min(agg.min, v);
            agg.max = std::max(agg.max, v);
        }
        agg.mean = static_cast<double>(sum) / static_cast<double>(scores.size());
        if (agg.range() >= options.divergence_threshold) out.divergence_flags.insert(c.id);
        out.weighted_total += c.weight * agg.mean;
        out.per_criterion.emplace(c.id, agg);
    }
    return out;
}

std::vector<AggregatedScore> rank_ttps(std::vector<AggregatedScore> aggregates) {
    std::sort(aggregates.begin(), aggregates.end(), [](const AggregatedScore& a, const AggregatedScore& b) {
        if (a.weighted_total != b.weighted_total) return a.weighted_total > b.weighted_total;
        const double ca = a.mean(criteria::kGraphConfidence);
        const double cb = b.mean(criteria::kGraphConfidence);
        if (ca != cb) return ca > cb;
        return a.ttp_id < b.ttp_id;
    });
    return aggregates;
}

json to_json(const AssessorScore& score) {
    return {{"assessor_id", score.assessor_id}, {"ttp_id", score.ttp_id}, {"values", score.values}};
}

AssessorScore parse_score(const json& doc) {
    if (!doc.is_object()) throw ParseError("score", "expected a JSON object");
    for (const char* key : {"assessor_id", "ttp_id"}) {
        if (!doc.contains(key) || !doc[key].is_string()) throw ParseError(key, "missing or not a string");
    }
    if (!doc.contains("values") || !doc["values"].is_object()) throw ParseError("values", "missing or not an object");
    AssessorScore s;
    s.assessor_id = doc["assessor_id"].get<std::string>();
    s.ttp_id = doc["ttp_id"].get<std::string>();
    for (auto it = doc["values"].begin(); it != doc["values"].end(); ++it) {
        if (!it->is_number_integer()) throw ParseError("values." + it.key(), "expected an integer");
        s.values[it.key()] = it->get<int>();
    }
    return s;
}

json to_json(const AggregatedScore& a) {
    json per = json::object();
    for (const auto& [id, c] : a.per_criterion) {
        per[id] = {{"mean", c.mean}, {"min", c.min}, {"max", c.max}, {"range", c.range()}};
    }
    return {{"ttp_id", a.ttp_id},
            {"per_criterion", per},
            {"weighted_total", a.weighted_total},
            {"divergence_flags", a.divergence_flags},
            {"assessor_count", a.assessor_count}};
}

AggregatedScore parse_aggregate(const json& doc) {
    AggregatedScore a;
    a.ttp_id = doc.at("ttp_id").get<std::string>();
    for (auto it = doc.at("per_criterion").begin(); it != doc.at("per_criterion").end(); ++it) {
        a.per_criterion[it.key()] = {it->at("mean").get<double>(), it->at("min").get<int>(), it->at("max").get<int>()};
    }
    a.weighted_total = doc.at("weighted_total").get<double>();
    a.divergence_flags = doc.at("divergence_flags").get<std::set<std::string>>();
    a.assessor_count = doc.at("assessor_count").get<int>();
    return a;
}

} // namespace tibsa::scoring
