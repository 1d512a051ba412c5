// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors

#include "tibsa/causal_graph.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

#include "tibsa/error.hpp"

namespace tibsa::graph {

using nlohmann::json;

namespace {

std::string lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

bool intersects(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    for (const auto& x : a) {
        const std::string lx = lower(x);
        for (const auto& y : b) {
            if (lx == lower(y)) return true;
        }
    }
    return false;
}

bool contains_tag(const Asset& asset, std::string_view tag) {
    const std::string t = lower(tag);
    auto match = [&](const std::string& s) { return lower(s) == t; };
    return std::any_of(asset.platforms.begin(), asset.platforms.end(), match) ||
           std::any_of(asset.tech_stack.begin(), asset.tech_stack.end(), match);
}

} // namespace

// --- enums ------------------------------------------------------------------------

std::string_view to_string(Zone zone) {
    switch (zone) {
    case Zone::InternetFacing: return "internet_facing";
    case Zone::Internal: return "internal";
    case Zone::Isolated: return "isolated";
    }
    return "internal";
}

Zone parse_zone(std::string_view text) {
    if (text == "internet_facing") return Zone::InternetFacing;
    if (text == "internal") return Zone::Internal;
    if (text == "isolated") return Zone::Isolated;
    throw ParseError("zone", "unknown zone '" + std::string(text) + "'");
}

std::string_view to_string(NodeKind kind) {
    switch (kind) {
    case NodeKind::ThreatActor: return "threat_actor";
    case NodeKind::Goal: return "goal";
    case NodeKind::Tactic: return "tactic";
    case NodeKind::Technique: return "technique";
    case NodeKind::SubTechnique: return "sub_technique";
    case NodeKind::AttackPattern: return "attack_pattern";
    case NodeKind::Weakness: return "weakness";
    case NodeKind::Vulnerability: return "vulnerability";
    case NodeKind::Asset: return "asset";
    case NodeKind::Action: return "action";
    }
    return "action";
}

NodeKind parse_node_kind(std::string_view text) {
    for (auto kind : {NodeKind::ThreatActor, NodeKind::Goal, NodeKind::Tactic, NodeKind::Technique,
                      NodeKind::SubTechnique, NodeKind::AttackPattern, NodeKind::Weakness, NodeKind::Vulnerability,
                      NodeKind::Asset, NodeKind::Action}) {
        if (to_string(kind) == text) return kind;
    }
    throw ParseError("kind", "unknown node kind '" + std::string(text) + "'");
}

std::string_view to_string(Relation relation) {
    switch (relation) {
    case Relation::Achieves: return "achieves";
    case Relation::Uses: return "uses";
    case Relation::Exploits: return "exploits";
    case Relation::Targets: return "targets";
    case Relation::LeadsTo: return "leads_to";
    }
    return "leads_to";
}

Relation parse_relation(std::string_view text) {
    for (auto r : {Relation::Achieves, Relation::Uses, Relation::Exploits, Relation::Targets, Relation::LeadsTo}) {
        if (to_string(r) == text) return r;
    }
    throw ParseError("relation", "unknown relation '" + std::string(text) + "'");
}

std::string node_id(NodeKind kind, std::string_view id) {
    if (kind == NodeKind::Technique || kind == NodeKind::SubTechnique) return std::string(id);
    return std::string(to_string(kind)) + ":" + std::string(id);
}

// --- inputs -------------------------------------------------------------------------

const Asset* LandscapeInventory::find_asset(std::string_view id) const {
    auto it = std::find_if(assets.begin(), assets.end(), [&](const Asset& a) { return a.id == id; });
    return it == assets.end() ? nullptr : &*it;
}

bool LandscapeInventory::excludes(std::string_view ttp_id) const {
    return std::any_of(exclusions.begin(), exclusions.end(), [&](const Exclusion& e) { return e.ttp_id == ttp_id; });
}

void LandscapeInventory::validate() const {
    std::vector<std::string> findings;
    std::set<std::string> ids;
    for (const auto& a : assets) {
        if (a.id.empty()) findings.emplace_back("asset with empty id");
        if (!ids.insert(a.id).second) findings.push_back("duplicate asset id '" + a.id + "'");
    }
    for (const auto& e : exclusions) {
        if (e.reason.empty()) findings.push_back("exclusion of '" + e.ttp_id + "' has no reason");
    }
    if (!findings.empty()) throw ValidationError(std::move(findings));
}

const Evidence* CtiReport::find_evidence(std::string_view ttp_id) const {
    auto it = std::find_if(evidence.begin(), evidence.end(), [&](const Evidence& e) { return e.ttp_id == ttp_id; });
    return it == evidence.end() ? nullptr : &*it;
}

void CtiReport::validate() const {
    std::vector<std::string> findings;
    std::set<std::string> goal_ids;
    for (const auto& g : goals) {
        if (g.id.empty()) findings.emplace_back("goal with empty id");
        if (!goal_ids.insert(g.id).second) findings.push_back("duplicate goal id '" + g.id + "'");
    }
    std::set<std::string> ttps;
    for (const auto& e : evidence) {
        if (!ttps.insert(e.ttp_id).second) findings.push_back("duplicate evidence for '" + e.ttp_id + "'");
        if (e.evidence_level < 1 || e.evidence_level > 5) {
            findings.push_back("evidence_level of '" + e.ttp_id + "' outside [1,5]");
        }
        if (e.confidence < 1 || e.confidence > 5) findings.push_back("confidence of '" + e.ttp_id + "' outside [1,5]");
        for (const auto& g : e.achieves) {
            if (!goal_ids.contains(g)) findings.push_back("'" + e.ttp_id + "' achieves unknown goal '" + g + "'");
        }
    }
    if (!findings.empty()) throw ValidationError(std::move(findings));
}

// --- CausalGraph --------------------------------------------------------------------

void CausalGraph::add_node(CausalNode node) {
    if (index_.contains(node.id)) throw ConflictError(node.id, "duplicate graph node '" + node.id + "'");
    index_.emplace(node.id, nodes_.size());
    nodes_.push_back(std::move(node));
}

bool CausalGraph::ensure_node(CausalNode node) {
    if (index_.contains(node.id)) return false;
    add_node(std::move(node));
    return true;
}

void CausalGraph::add_edge(CausalEdge edge) {
    if (!index_.contains(edge.from) || !index_.contains(edge.to)) {
        throw ValidationError("edge " + edge.from + " -> " + edge.to + " references a missing node");
    }
    auto key = std::make_pair(edge.from, edge.to);
    if (auto it = pair_index_.find(key); it != pair_index_.end()) {
        auto& existing = edges_[it->second];
        existing.confidence = std::max(existing.confidence, edge.confidence);
        return;
    }
    const std::size_t idx = edges_.size();
    pair_index_.emplace(std::move(key), idx);
    out_[edge.from].push_back(idx);
    in_[edge.to].push_back(idx);
    edges_.push_back(std::move(edge));
}

const CausalNode* CausalGraph::find_node(std::string_view id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &nodes_[it->second];
}

const CausalEdge* CausalGraph::find_edge(std::string_view from, std::string_view to) const {
    auto it = pair_index_.find(std::make_pair(std::string(from), std::string(to)));
    return it == pair_index_.end() ? nullptr : &edges_[it->second];
}

std::vector<std::string> CausalGraph::goal_ids() const {
    std::vector<std::string> out;
    for (const auto& n : nodes_) {
        if (n.kind == NodeKind::Goal) out.push_back(n.id);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::string> CausalGraph::technique_ids() const {
    std::vector<std::string> out;
    for (const auto& n : nodes_) {
        if (n.is_technique()) out.push_back(n.id);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::span<const std::size_t> CausalGraph::out_edges(std::string_view id) const {
    auto it = out_.find(id);
    if (it == out_.end()) return {};
    return it->second;
}

std::span<const std::size_t> CausalGraph::in_edges(std::string_view id) const {
    auto it = in_.find(id);
    if (it == in_.end()) return {};
    return it->second;
}

bool CausalGraph::is_acyclic() const {
    enum class Mark { White, Grey, Black };
    std::vector<Mark> mark(nodes_.size(), Mark::White);
    std::function<bool(std::size_t)> visit = [&](std::size_t n) {
        mark[n] = Mark::Grey;
        for (std::size_t e : out_edges(nodes_[n].id)) {
            const auto& edge = edges_[e];
            if (edge.relation != Relation::LeadsTo && edge.relation != Relation::Achieves) continue;
            const std::size_t next = index_.find(edge.to)->second;
            if (mark[next] == Mark::Grey) return false;
            if (mark[next] == Mark::White && !visit(next)) return false;
        }
        mark[n] = Mark::Black;
        return true;
    };
    for (std::size_t n = 0; n < nodes_.size(); ++n) {
        if (mark[n] == Mark::White && !visit(n)) return false;
    }
    return true;
}

// --- build ------------------------------------------------------------------------------

CausalGraph build_graph(const kb::KnowledgeBase& kb, const CtiReport& cti, const LandscapeInventory& landscape,
                        const GraphOptions& options) {
    cti.validate();
    landscape.validate();

    CausalGraph g;
    const std::string actor = node_id(NodeKind::ThreatActor, cti.actor.empty() ? cti.campaign_id : cti.actor);
    g.add_node({actor, NodeKind::ThreatActor, cti.actor});
    for (const auto& goal : cti.goals) {
        g.add_node({node_id(NodeKind::Goal, goal.id), NodeKind::Goal,
                    goal.description.empty() ? goal.id : goal.description});
    }

    std::vector<std::string> unresolved;
    auto technique_record = [&](const std::string& id) -> const kb::TechniqueRecord* {
        const auto* t = kb.find_technique(id);
        if (t == nullptr) unresolved.push_back(id);
        return t;
    };
    auto add_technique = [&](const kb::TechniqueRecord& t) {
        g.ensure_node({t.id, t.parent_id ? NodeKind::SubTechnique : NodeKind::Technique, t.name});
    };

    // Technique nodes: evidenced first (CTI order), then analyst adaptations,
    // flow targets and hinted TTPs, then optional tactic siblings.
    std::vector<std::string> order;
    for (const auto& e : cti.evidence) {
        if (const auto* t = technique_record(e.ttp_id)) {
            add_technique(*t);
            order.push_back(t->id);
        }
    }
    auto add_candidate = [&](const std::string& id) {
        if (const auto* t = technique_record(id)) {
            if (g.find_node(id) == nullptr) order.push_back(id);
            add_technique(*t);
        }
    };
    for (const auto& id : cti.adaptations) add_candidate(id);
    for (const auto& e : cti.evidence) {
        for (const auto& next : e.leads_to) add_candidate(next);
    }
    for (const auto& hint : cti.provided_assets) {
        for (const auto& id : hint.ttp_ids) add_candidate(id);
    }
    if (!unresolved.empty()) {
        std::sort(unresolved.begin(), unresolved.end());
        unresolved.erase(std::unique(unresolved.begin(), unresolved.end()), unresolved.end());
        std::string list;
        for (const auto& id : unresolved) list += (list.empty() ? "" : ", ") + id;
        throw NotFoundError("TTP ids not in knowledge base: " + list);
    }
    if (options.expand_tactic_siblings) {
        std::set<std::string> tactics;
        for (const auto& e : cti.evidence) {
            for (const auto& tac : kb.find_technique(e.ttp_id)->tactic_ids) tactics.insert(tac);
        }
        for (const auto& [id, t] : kb.techniques()) {
            if (g.find_node(id) != nullptr) continue;
            if (std::any_of(t.tactic_ids.begin(), t.tactic_ids.end(), [&](const auto& x) { return tactics.contains(x); })) {
                add_technique(t);
                order.push_back(id);
            }
        }
    }

    auto confidence_of = [&](const std::string& ttp) {
        const auto* e = cti.find_evidence(ttp);
        return e ? e->confidence : options.default_confidence;
    };
    auto asset_node = [&](const std::string& asset_id) {
        const std::string id = node_id(NodeKind::Asset, asset_id);
        const auto* a = landscape.find_asset(asset_id);
        g.ensure_node({id, NodeKind::Asset, a && !a->name.empty() ? a->name : asset_id});
        return id;
    };

    for (const auto& e : cti.evidence) g.add_edge({actor, e.ttp_id, Relation::Uses, e.confidence});

    std::map<std::string, std::vector<std::string>> targeted; // technique -> asset node ids
    for (const auto& ttp : order) {
        const auto& t = *kb.find_technique(ttp);
        const int conf = confidence_of(ttp);
        for (const auto& tactic : t.tactic_ids) {
            const std::string tid = node_id(NodeKind::Tactic, tactic);
            g.ensure_node({tid, NodeKind::Tactic, tactic});
            g.add_edge({ttp, tid, Relation::Achieves, conf});
        }
        for (const auto& asset : landscape.assets) {
            if (intersects(t.platforms, asset.platforms)) {
                const std::string aid = asset_node(asset.id);
                g.add_edge({ttp, aid, Relation::Targets, conf});
                targeted[ttp].push_back(aid);
            }
        }
    }
    for (const auto& hint : cti.provided_assets) {
        const std::string aid = asset_node(hint.asset_id);
        for (const auto& ttp : hint.ttp_ids) {
            g.add_edge({ttp, aid, Relation::Targets, confidence_of(ttp)});
            targeted[ttp].push_back(aid);
        }
    }

    for (const auto& ttp : order) {
        const int conf = confidence_of(ttp);
        for (const auto& chain : kb::resolve_chain(kb, ttp)) {
            std::string prev = ttp;
            for (std::size_t i = 1; i < chain.size(); ++i) {
                const auto& link = chain[i];
                const int edge_conf = i == 1 ? conf : options.default_confidence;
                if (link.kind == kb::LinkKind::AssetType) {
                    for (const auto& asset : landscape.assets) {
                        if (contains_tag(asset, link.id)) {
                            g.add_edge({prev, asset_node(asset.id), Relation::Targets, edge_conf});
                        }
                    }
                    continue;
                }
                const NodeKind kind = link.kind == kb::LinkKind::AttackPattern ? NodeKind::AttackPattern
                                      : link.kind == kb::LinkKind::Weakness    ? NodeKind::Weakness
                                                                               : NodeKind::Vulnerability;
                const std::string id = node_id(kind, link.id);
                std::string label = link.id;
                if (kind == NodeKind::AttackPattern) {
                    if (const auto* p = kb.find_attack_pattern(link.id); p && !p->name.empty()) label = p->name;
                } else if (kind == NodeKind::Weakness) {
                    if (const auto* w = kb.find_weakness(link.id); w && !w->name.empty()) label = w->name;
                } else if (const auto* v = kb.find_vulnerability(link.id); v && !v->name.empty()) {
                    label = v->name;
                }
                g.ensure_node({id, kind, label});
                g.add_edge({prev, id, Relation::Exploits, edge_conf});
                prev = id;
            }
        }
    }

    for (const auto& e : cti.evidence) {
        for (const auto& next : e.leads_to) g.add_edge({e.ttp_id, next, Relation::LeadsTo, e.confidence});
        for (const auto& goal : e.achieves) {
            const std::string gid = node_id(NodeKind::Goal, goal);
            auto it = targeted.find(e.ttp_id);
            if (it == targeted.end() || it->second.empty()) {
                g.add_edge({e.ttp_id, gid, Relation::Achieves, e.confidence});
            } else {
                for (const auto& aid : it->second) g.add_edge({aid, gid, Relation::LeadsTo, e.confidence});
            }
        }
    }

    if (!g.is_acyclic()) throw ValidationError("causal graph contains a leads_to/achieves cycle");
    return g;
}

CausalGraph tree_restriction(const CausalGraph& graph) {
    CausalGraph tree;
    for (const auto& n : graph.nodes()) tree.add_node(n);
    for (const auto& n : graph.nodes()) {
        const auto parents = graph.in_edges(n.id);
        if (parents.empty()) continue;
        const CausalEdge* first = nullptr;
        for (std::size_t e : parents) {
            const auto& edge = graph.edges()[e];
            if (first == nullptr || edge.from < first->from) first = &edge;
        }
        tree.add_edge(*first);
    }
    return tree;
}

// --- node-link ----------------------------------------------------------------------------

json to_node_link(const CausalGraph& graph) {
    json nodes = json::array();
    for (const auto& n : graph.nodes()) nodes.push_back({{"id", n.id}, {"kind", to_string(n.kind)}, {"label", n.label}});
    json edges = json::array();
    for (const auto& e : graph.edges()) {
        edges.push_back({{"from", e.from}, {"to", e.to}, {"relation", to_string(e.relation)}, {"confidence", e.confidence}});
    }
    return {{"nodes", nodes}, {"edges", edges}};
}

CausalGraph from_node_link(const json& doc) {
    CausalGraph g;
    for (const auto& n : doc.at("nodes")) {
        g.add_node({n.at("id").get<std::string>(), parse_node_kind(n.at("kind").get<std::string>()),
                    n.value("label", "")});
    }
    for (const auto& e : doc.at("edges")) {
        g.add_edge({e.at("from").get<std::string>(), e.at("to").get<std::string>(),
                    parse_relation(e.at("relation").get<std::string>()), e.value("confidence", 3)});
    }
    return g;
}

// --- paths ----------------------------------------------------------------------------------

int path_propensity(const CausalGraph& graph, std::span<const std::string> path, const LandscapeInventory& landscape) {
    int total = 0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const CausalEdge* edge = graph.find_edge(path[i], path[i + 1]);
        if (edge == nullptr) throw ValidationError("no edge " + path[i] + " -> " + path[i + 1]);
        int applicability = 1;
        const CausalNode* target = graph.find_node(edge->to);
        if (target != nullptr && target->kind == NodeKind::Asset) {
            const std::string asset_id = target->id.substr(to_string(NodeKind::Asset).size() + 1);
            applicability = landscape.find_asset(asset_id) != nullptr ? 1 : 0;
        }
        total += edge->confidence * applicability;
    }
    return total;
}

std::vector<AttackPath> enumerate_paths(const CausalGraph& graph, std::string_view goal, int max_depth,
                                        const LandscapeInventory& landscape) {
    const CausalNode* goal_node = graph.find_node(goal);
    if (goal_node == nullptr || goal_node->kind != NodeKind::Goal) {
        throw NotFoundError("unknown goal node '" + std::string(goal) + "'");
    }
    if (max_depth < 1) throw ValidationError("max_depth must be >= 1");

    std::vector<AttackPath> paths;
    std::vector<std::string> stack;
    std::set<std::string, std::less<>> on_path;

    std::function<void(const std::string&)> walk = [&](const std::string& node) {
        if (node == goal) {
            AttackPath p;
            p.nodes = stack;
            p.propensity = path_propensity(graph, p.nodes, landscape);
            paths.push_back(std::move(p));
            return;
        }
        if (static_cast<int>(stack.size()) - 1 >= max_depth) return;
        for (std::size_t e : graph.out_edges(node)) {
            const auto& next = graph.edges()[e].to;
            if (on_path.contains(next)) continue;
            stack.push_back(next);
            on_path.insert(next);
            walk(next);
            on_path.erase(next);
            stack.pop_back();
        }
    };

    for (const auto& start : graph.technique_ids()) {
        stack = {start};
        on_path = {start};
        walk(start);
    }

    std::sort(paths.begin(), paths.end(), [](const AttackPath& a, const AttackPath& b) {
        if (a.propensity != b.propensity) return a.propensity > b.propensity;
        return a.nodes < b.nodes;
    });
    return paths;
}

} // namespace tibsa::graph
