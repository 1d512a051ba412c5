// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors

#pragma once

#include <array>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace tibsa::scoring {

/// One rubric row: a question with five ordinal anchors (value 1..5).
struct CriterionDef {
    std::string id;
    std::string question;
    std::array<std::string, 5> anchors;
    double weight = 1.0;

    bool operator==(const CriterionDef&) const = default;
};

struct Rubric {
    std::string version;
    std::vector<CriterionDef> criteria;

    const CriterionDef* find(std::string_view id) const;
    /// Throws ValidationError on duplicate ids, no criteria, or negative weights.
    void validate() const;

    bool operator==(const Rubric&) const = default;
};

/// Criterion ids of the default rubric, in row order.
namespace criteria {
inline constexpr std::string_view kEvidence = "evidence";
inline constexpr std::string_view kSkillRequired = "skill-required";
inline constexpr std::string_view kApplicability = "applicability";
inline constexpr std::string_view kPositioningEffect = "positioning-effect";
inline constexpr std::string_view kRecoveryTime = "recovery-time";
inline constexpr std::string_view kRestoreCost = "restore-cost";
inline constexpr std::string_view kDetectability = "detectability";
inline constexpr std::string_view kGraphConfidence = "graph-confidence";
} // namespace criteria

/// Eight-criterion rubric with verbatim anchors, every weight 1.
Rubric default_rubric();

Rubric parse_rubric(const nlohmann::json& doc);
nlohmann::json to_json(const Rubric& rubric);

struct AssessorScore {
    std::string assessor_id;
    std::string ttp_id;
    std::map<std::string, int> values; // criterion id -> 1..5

    bool operator==(const AssessorScore&) const = default;
};

struct ScoreFinding {
    enum class Kind { Missing, OutOfRange, Unknown };
    Kind kind;
    std::string criterion_id;
    std::string message;
};

/// Empty when the score is complete and in range.
std::vector<ScoreFinding> validate_score(const Rubric& rubric, const AssessorScore& score);

struct CriterionAggregate {
    double mean = 0;
    int min = 0;
    int max = 0;

    int range() const { return max - min; }
    bool operator==(const CriterionAggregate&) const = default;
};

struct AggregatedScore {
    std::string ttp_id;
    std::map<std::string, CriterionAggregate> per_criterion;
    double weighted_total = 0;
    std::set<std::string> divergence_flags;
    int assessor_count = 0;

    /// Mean for a criterion, 0 when absent.
    double mean(std::string_view criterion_id) const;
    bool operator==(const AggregatedScore&) const = default;
};

struct AggregateOptions {
    int divergence_threshold = 3;
};

/// Per-criterion mean and range over assessors for one TTP, weighted sum of
/// means as the total. Throws ValidationError on empty input, mixed TTPs or
/// any invalid score.
AggregatedScore aggregate(const Rubric& rubric, std::span<const AssessorScore> scores,
                          const AggregateOptions& options = {});

/// Descending weighted_total, then higher graph-confidence mean, then ttp id.
std::vector<AggregatedScore> rank_ttps(std::vector<AggregatedScore> aggregates);

nlohmann::json to_json(const AssessorScore& score);
AssessorScore parse_score(const nlohmann::json& doc);
nlohmann::json to_json(const AggregatedScore& aggregate);
AggregatedScore parse_aggregate(const nlohmann::json& doc);

} // namespace tibsa::scoring
