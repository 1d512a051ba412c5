// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tibsa/causal_graph.hpp"
#include "tibsa/effectiveness.hpp"
#include "tibsa/kb.hpp"
#include "tibsa/scoring.hpp"

namespace tibsa::registry {

enum class Mode { Full, Rapid };
enum class Status { Draft, Scored, Evaluated, Reported };
enum class AssetSource { CtiDirect, GoalAnalysis };

std::string_view to_string(Mode mode);
std::string_view to_string(Status status);
std::string_view to_string(AssetSource source);
Mode parse_mode(std::string_view text);
Status parse_status(std::string_view text);
AssetSource parse_asset_source(std::string_view text);

/// Returns the current time as ISO-8601 UTC. Injected so tests can pin it.
using Clock = std::function<std::string()>;
Clock system_clock();

struct ImpactedAsset {
    std::string asset_id;
    graph::TtpClass cls = graph::TtpClass::PossibleOnly; // never Excluded
    AssetSource source = AssetSource::GoalAnalysis;

    bool operator==(const ImpactedAsset&) const = default;
};

struct Settings {
    int probable_threshold = 3;
    int divergence_threshold = 3;
    int max_depth = graph::kDefaultMaxDepth;

    /// ValidationError unless thresholds lie in [1,5] / [1,4] and max_depth in [1,32].
    void validate() const;
    bool operator==(const Settings&) const = default;
};

struct NamedReplan {
    std::string id;
    std::string description;
    graph::ReplanResult result;

    bool operator==(const NamedReplan&) const = default;
};

struct Recommendation {
    std::string id;
    std::string text;
    std::vector<std::string> refs; // "eval:<control>" or "replan:<id>"

    bool operator==(const Recommendation&) const = default;
};

struct Assessment {
    std::string id;
    Mode mode = Mode::Full;
    Status status = Status::Draft;
    bool assume_breach = true;
    std::string created_at;
    std::string updated_at;

    std::string kb_hash;
    graph::CtiReport cti;
    graph::LandscapeInventory landscape;
    scoring::Rubric rubric;
    effectiveness::ScoreMatrix matrix = effectiveness::ScoreMatrix::defaults();
    Settings settings;
    graph::CausalGraph graph;

    std::vector<ImpactedAsset> impacted_assets;
    std::vector<graph::TtpClassification> classifications;
    std::vector<std::string> scoped_ttps; // sorted

    std::vector<scoring::AssessorScore> scores;
    std::vector<scoring::AggregatedScore> aggregates; // ranked

    std::vector<effectiveness::ControlRecord> controls;
    std::vector<effectiveness::MitigationEntry> entries;
    effectiveness::CoverageMatrix coverage;
    std::vector<effectiveness::ControlEvaluation> evaluations; // ranked

    std::optional<graph::AttackPath> baseline_path;
    std::vector<NamedReplan> replans;
    std::vector<std::string> findings;
    std::vector<Recommendation> recommendations;
    std::string signoff;
    std::optional<nlohmann::json> report;

    const graph::TtpClassification* classification(std::string_view ttp_id) const;
    graph::AdversaryContext adversary_context() const;
    bool operator==(const Assessment&) const = default;
};

struct CreateOptions {
    Settings settings;
    effectiveness::ScoreMatrix matrix = effectiveness::ScoreMatrix::defaults();
    graph::GraphOptions graph;
    Clock clock = system_clock();
};

/// Build the graph, classify, scope and seed impacted assets. Rapid mode
/// turns assume-breach off, which limits goal-analysis assets to the
/// internet-facing zone, and scopes only probable TTPs.
Assessment create_assessment(std::string id, Mode mode, const kb::KnowledgeBase& kb, const graph::CtiReport& cti,
                             const graph::LandscapeInventory& landscape, const scoring::Rubric& rubric,
                             const CreateOptions& options = {});

/// Adds or replaces (assessor, ttp) scores; status -> scored. StatusError once
/// evaluated; ValidationError naming the criterion for bad values or for
/// TTPs outside the scope.
void submit_scores(Assessment& a, std::span<const scoring::AssessorScore> scores, const Clock& clock = system_clock());

/// Replaces the control inventory. StatusError once reported; ValidationError
/// when an entry names an unknown control or a TTP absent from the graph.
void set_controls(Assessment& a, const effectiveness::ControlInventory& inventory,
                  const Clock& clock = system_clock());

/// Aggregation, TTP ranking, coverage matrix, control evaluation and ranking,
/// baseline adversary path and per-control removal replans; status ->
/// evaluated. ValidationError listing scoped TTPs without scores.
void run_pipeline(Assessment& a, const Clock& clock = system_clock());

/// SHA-256 of the canonical serialization with timestamps removed.
std::string content_hash(const Assessment& a);

nlohmann::json to_json(const Assessment& a);
Assessment parse_assessment(const nlohmann::json& doc);

// --- what-if ---------------------------------------------------------------------

struct Change {
    enum class Kind { AddControl, RemoveControl, ChangeLevel };
    Kind kind = Kind::ChangeLevel;
    effectiveness::ControlRecord control;               // add
    std::vector<effectiveness::MitigationEntry> entries; // add
    std::string control_id;                              // remove / change
    std::string ttp_id;                                  // change
    effectiveness::Criterion criterion;                  // change
    effectiveness::Level level = effectiveness::Level::Low; // change

    bool operator==(const Change&) const = default;
};

struct WhatIfResult {
    std::vector<effectiveness::ControlEvaluation> evaluations; // ranked
    std::map<std::string, double> ratio_deltas;                // controls present before and after
    std::map<std::string, int> benefit_deltas;
    std::vector<std::string> added;
    std::vector<std::string> removed;
    std::vector<effectiveness::UpgradeEffect> upgrades;
    graph::ReplanResult replan;

    bool operator==(const WhatIfResult&) const = default;
};

/// Pure: `a` is left untouched. StatusError before evaluation; ValidationError
/// when a change names an unknown control, entry or TTP.
WhatIfResult whatif(const Assessment& a, std::span<const Change> changes);

Change parse_change(const nlohmann::json& doc, const effectiveness::ScoreMatrix& matrix);
nlohmann::json to_json(const Change& change);
nlohmann::json to_json(const WhatIfResult& result);

// --- report ----------------------------------------------------------------------

struct Report {
    nlohmann::json document; // {"assessment_id", "generated_at", "sections": [5 objects]}
    std::string markup;      // plain-text rendering
};

/// Five sections: consolidated inputs, effectiveness conclusions,
/// recommendations, effectiveness rationale, strategy impact. Requires
/// status evaluated; status -> reported.
Report generate_report(Assessment& a, const Clock& clock = system_clock());

/// Plain-markup rendering of a report document.
std::string render_markup(const nlohmann::json& document);

} // namespace tibsa::registry
