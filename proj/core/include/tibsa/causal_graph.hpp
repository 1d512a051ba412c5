// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors

#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tibsa/effectiveness.hpp"
#include "tibsa/kb.hpp"
#include "tibsa/scoring.hpp"

namespace tibsa::graph {

// --- inputs -------------------------------------------------------------------

enum class Zone { InternetFacing, Internal, Isolated };
std::string_view to_string(Zone zone);
Zone parse_zone(std::string_view text);

struct Asset {
    std::string id;
    std::string name;
    std::vector<std::string> platforms;
    Zone zone = Zone::Internal;
    std::vector<std::string> tech_stack;

    bool operator==(const Asset&) const = default;
};

/// A TTP the landscape contradicts (e.g. a hypervisor-specific technique
/// against a landscape running a different hypervisor).
struct Exclusion {
    std::string ttp_id;
    std::string reason;

    bool operator==(const Exclusion&) const = default;
};

struct LandscapeInventory {
    std::vector<Asset> assets;
    std::vector<Exclusion> exclusions;

    const Asset* find_asset(std::string_view id) const;
    bool excludes(std::string_view ttp_id) const;
    /// Throws ValidationError on duplicate asset ids or empty exclusion reasons.
    void validate() const;

    bool operator==(const LandscapeInventory&) const = default;
};

struct Goal {
    std::string id;
    std::string description;

    bool operator==(const Goal&) const = default;
};

/// One evidenced TTP. `leads_to` names follow-on TTPs in the campaign flow;
/// `achieves` names goals this TTP completes.
struct Evidence {
    std::string ttp_id;
    int evidence_level = 1;
    int confidence = 3;
    std::string note;
    std::vector<std::string> leads_to;
    std::vector<std::string> achieves;

    bool operator==(const Evidence&) const = default;
};

struct AssetHint {
    std::string asset_id;
    std::vector<std::string> ttp_ids;

    bool operator==(const AssetHint&) const = default;
};

struct CtiReport {
    std::string campaign_id;
    std::string actor;
    std::vector<Goal> goals;
    std::vector<Evidence> evidence;
    std::vector<AssetHint> provided_assets;
    /// Analyst-flagged adaptation candidates: TTPs with no evidence that the
    /// adversary may switch to.
    std::vector<std::string> adaptations;

    const Evidence* find_evidence(std::string_view ttp_id) const;
    /// Range checks on evidence_level / confidence, duplicate goal or evidence ids.
    void validate() const;

    bool operator==(const CtiReport&) const = default;
};

// --- graph --------------------------------------------------------------------

enum class NodeKind {
    ThreatActor, Goal, Tactic, Technique, SubTechnique, AttackPattern, Weakness, Vulnerability, Asset, Action
};
enum class Relation { Achieves, Uses, Exploits, Targets, LeadsTo };

std::string_view to_string(NodeKind kind);
std::string_view to_string(Relation relation);
NodeKind parse_node_kind(std::string_view text);
Relation parse_relation(std::string_view text);

/// Technique nodes use the TTP id verbatim; every other node id is
/// "<kind>:<id>" so ids from different catalogs never collide.
std::string node_id(NodeKind kind, std::string_view id);

struct CausalNode {
    std::string id;
    NodeKind kind = NodeKind::Action;
    std::string label;

    bool is_technique() const { return kind == NodeKind::Technique || kind == NodeKind::SubTechnique; }
    bool operator==(const CausalNode&) const = default;
};

struct CausalEdge {
    std::string from;
    std::string to;
    Relation relation = Relation::LeadsTo;
    int confidence = 3; // 1 = extreme uncertainty .. 5 = extreme certainty

    bool operator==(const CausalEdge&) const = default;
};

/// Directed, confidence-weighted graph. Nodes may have several parents.
/// At most one edge per ordered node pair: re-adding a pair keeps the first
/// relation and the higher confidence.
class CausalGraph {
public:
    /// Throws ConflictError on a duplicate id.
    void add_node(CausalNode node);
    /// Adds the node when absent; returns false if it already existed.
    bool ensure_node(CausalNode node);
    /// Throws ValidationError when an endpoint is missing.
    void add_edge(CausalEdge edge);

    const CausalNode* find_node(std::string_view id) const;
    const CausalEdge* find_edge(std::string_view from, std::string_view to) const;

    const std::vector<CausalNode>& nodes() const { return nodes_; }
    const std::vector<CausalEdge>& edges() const { return edges_; }
    std::vector<std::string> goal_ids() const;
    std::vector<std::string> technique_ids() const;

    /// Edge indices leaving / entering a node, in insertion order.
    std::span<const std::size_t> out_edges(std::string_view id) const;
    std::span<const std::size_t> in_edges(std::string_view id) const;

    /// True when the leads_to / achieves sub-graph has no directed cycle.
    bool is_acyclic() const;

    bool operator==(const CausalGraph& other) const { return nodes_ == other.nodes_ && edges_ == other.edges_; }

private:
    std::vector<CausalNode> nodes_;
    std::vector<CausalEdge> edges_;
    std::map<std::string, std::size_t, std::less<>> index_;
    std::map<std::pair<std::string, std::string>, std::size_t> pair_index_;
    std::map<std::string, std::vector<std::size_t>, std::less<>> out_;
    std::map<std::string, std::vector<std::size_t>, std::less<>> in_;
};

struct GraphOptions {
    int default_confidence = 3;
    /// Also add KB techniques sharing a tactic with an evidenced technique as
    /// unevidenced candidate nodes.
    bool expand_tactic_siblings = false;
};

/// Graph layout:
///   actor -uses-> technique (evidence confidence)
///   technique -achieves-> tactic (from the KB)
///   technique -leads_to-> technique (campaign flow)
///   technique -targets-> asset (landscape platform match or CTI hint)
///   technique -exploits-> pattern -exploits-> weakness -exploits-> vulnerability -targets-> asset
///   asset -leads_to-> goal, and technique -achieves-> goal when it targets no asset
/// Edges leaving an evidenced technique carry its CTI confidence; all others
/// carry `default_confidence`. Throws NotFoundError for TTPs missing from the
/// KB and ValidationError when the result would contain a cycle.
CausalGraph build_graph(const kb::KnowledgeBase& kb, const CtiReport& cti, const LandscapeInventory& landscape,
                        const GraphOptions& options = {});

nlohmann::json to_node_link(const CausalGraph& graph);
CausalGraph from_node_link(const nlohmann::json& doc);

/// Tree restriction: keep only each node's lexicographically first parent
/// edge. Used to contrast causal graphs with attack trees.
CausalGraph tree_restriction(const CausalGraph& graph);

// --- paths ----------------------------------------------------------------------

struct AttackPath {
    std::vector<std::string> nodes;
    int propensity = 0;
    int detect_coverage = 0;
    bool viable = true;

    bool operator==(const AttackPath&) const = default;
};

inline constexpr int kDefaultMaxDepth = 8;

/// Sum over path edges of confidence x applicability, where an edge into an
/// asset node counts only when that asset is in the landscape. Throws
/// ValidationError when consecutive nodes are not joined by an edge.
int path_propensity(const CausalGraph& graph, std::span<const std::string> path,
                    const LandscapeInventory& landscape);

/// All simple paths (at most `max_depth` edges) from any technique node to
/// `goal`, ordered by descending propensity then node-id sequence. Throws
/// NotFoundError when `goal` is not a goal node and ValidationError when
/// max_depth < 1.
std::vector<AttackPath> enumerate_paths(const CausalGraph& graph, std::string_view goal, int max_depth,
                                        const LandscapeInventory& landscape);

// --- classification ---------------------------------------------------------------

enum class TtpClass { Probable, Plausible, PossibleOnly, Excluded };
enum class Sphere { Risk, Uncertainty };
std::string_view to_string(TtpClass cls);
std::string_view to_string(Sphere sphere);
TtpClass parse_ttp_class(std::string_view text);
Sphere parse_sphere(std::string_view text);

/// Reason codes attached to classifications.
namespace reason {
inline constexpr std::string_view kLandscapeExclusion = "landscape_exclusion";
inline constexpr std::string_view kNoPlatformMatch = "no_platform_match";
inline constexpr std::string_view kPlatformMatch = "platform_match";
inline constexpr std::string_view kEvidenceAtThreshold = "evidence_at_or_above_threshold";
inline constexpr std::string_view kEvidenceBelowThreshold = "evidence_below_threshold";
inline constexpr std::string_view kTacticSibling = "tactic_sibling_of_probable_or_blocked";
inline constexpr std::string_view kAnalystAdaptation = "analyst_adaptation";
} // namespace reason

struct TtpClassification {
    std::string ttp_id;
    TtpClass cls = TtpClass::PossibleOnly;
    Sphere sphere = Sphere::Uncertainty;
    std::vector<std::string> rationale;

    bool operator==(const TtpClassification&) const = default;
};

struct ClassifyOptions {
    int probable_threshold = 3;
};

/// Exactly one classification per technique node, sorted by ttp id.
std::vector<TtpClassification> classify_ttps(const CausalGraph& graph, const kb::KnowledgeBase& kb,
                                             const CtiReport& cti, const LandscapeInventory& landscape,
                                             const ClassifyOptions& options = {});

Sphere sphere_for(TtpClass cls);

// --- adversary replanning ------------------------------------------------------------

/// Everything the adversary model needs besides the control entries.
struct AdversaryContext {
    const CausalGraph& graph;
    const LandscapeInventory& landscape;
    std::span<const TtpClassification> classifications;
    int max_depth = kDefaultMaxDepth;
    const effectiveness::ScoreMatrix& matrix = effectiveness::ScoreMatrix::defaults();
};

/// Sum of DETECT scores of every entry covering a technique on the path.
int detect_coverage(const AttackPath& path, std::span<const effectiveness::MitigationEntry> entries,
                    const effectiveness::ScoreMatrix& matrix = effectiveness::ScoreMatrix::defaults());

/// Sum of recovery-time and restore-cost means of the path's techniques.
double impact_score(const AttackPath& path, std::span<const scoring::AggregatedScore> aggregates);

/// Highest-propensity viable path to any goal. A path is viable when every
/// technique on it is probable or plausible and none carries a PREVENT-High
/// entry. Ties: lower detect coverage, then node-id sequence.
std::optional<AttackPath> adversary_best_path(const AdversaryContext& context,
                                              std::span<const effectiveness::MitigationEntry> entries);

struct ReplanDeltas {
    int propensity = 0;
    int detect_coverage = 0;
    double impact = 0;

    bool operator==(const ReplanDeltas&) const = default;
};

struct ReplanResult {
    std::optional<AttackPath> old_path;
    std::optional<AttackPath> new_path;
    bool paradox = false;
    double old_impact = 0;
    double new_impact = 0;
    ReplanDeltas deltas; // new - old, zero unless both paths exist

    bool operator==(const ReplanResult&) const = default;
};

/// Replans the adversary after a control change. Paradox when the new path is
/// less covered by detection than the old one was, or has higher impact.
ReplanResult replan_after_control(const AdversaryContext& context,
                                  std::span<const effectiveness::MitigationEntry> before,
                                  std::span<const effectiveness::MitigationEntry> after,
                                  std::span<const scoring::AggregatedScore> aggregates);

// --- file formats -----------------------------------------------------------------------

CtiReport parse_cti(const nlohmann::json& doc);
nlohmann::json to_json(const CtiReport& cti);
LandscapeInventory parse_landscape(const nlohmann::json& doc);
nlohmann::json to_json(const LandscapeInventory& landscape);
nlohmann::json to_json(const TtpClassification& c);
TtpClassification parse_classification(const nlohmann::json& doc);
nlohmann::json to_json(const AttackPath& path);
AttackPath parse_path(const nlohmann::json& doc);
nlohmann::json to_json(const ReplanResult& result);
ReplanResult parse_replan(const nlohmann::json& doc);

} // namespace tibsa::graph
