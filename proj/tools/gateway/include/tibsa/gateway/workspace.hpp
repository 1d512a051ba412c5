// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors

#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tibsa/gateway/config.hpp"
#include "tibsa/kb.hpp"
#include "tibsa/register.hpp"

namespace tibsa::gateway {

struct CatalogInput {
    kb::CatalogKind kind = kb::CatalogKind::Techniques;
    std::string document;
    std::string source = "inline";
};

/// Engine facade shared by the CLI and the HTTP service. Every call returns
/// the JSON the interfaces print or send; mutations persist the register
/// when a register path is configured and report the new content hash.
///
/// Mutations of one assessment are serialized; reads work on snapshots.
class Workspace {
public:
    explicit Workspace(GatewayConfig config, registry::Clock clock = registry::system_clock());

    const GatewayConfig& config() const { return config_; }
    const scoring::Rubric& rubric() const { return rubric_; }
    const effectiveness::ScoreMatrix& matrix() const { return matrix_; }

    /// Merge the inputs into a KB. With `store`, the snapshot is kept in the register.
    nlohmann::json ingest(std::span<const CatalogInput> inputs, bool store);
    kb::KnowledgeBase build_kb(std::span<const CatalogInput> inputs) const;

    /// Node-link graph for ad-hoc inputs, without creating an assessment.
    nlohmann::json build_graph(std::span<const CatalogInput> inputs, const nlohmann::json& cti,
                               const nlohmann::json& landscape) const;
    nlohmann::json classify(std::span<const CatalogInput> inputs, const nlohmann::json& cti,
                            const nlohmann::json& landscape) const;

    /// request: {"id", "mode"?, "kb_hash"?, "catalogs"?: [{"kind","document"}],
    /// "cti", "landscape", "rubric"?}. `catalogs` extends the request's catalogs.
    nlohmann::json create(const nlohmann::json& request, std::span<const CatalogInput> catalogs,
                          const std::string& actor);

    nlohmann::json list() const;
    nlohmann::json get(std::string_view id) const;
    nlohmann::json classifications(std::string_view id) const;
    nlohmann::json graph(std::string_view id) const;
    nlohmann::json aggregate(std::string_view id) const;
    nlohmann::json ttp_ranking(std::string_view id) const;
    nlohmann::json control_ranking(std::string_view id) const;
    /// body: {"changes": [...]} or a bare array. Never mutates.
    nlohmann::json whatif(std::string_view id, const nlohmann::json& body) const;
    std::string content_hash(std::string_view id) const;

    /// body: {"scores": [...]} or a bare array.
    nlohmann::json submit_scores(std::string_view id, const nlohmann::json& body, const std::string& actor);
    nlohmann::json set_controls(std::string_view id, const nlohmann::json& inventory, const std::string& actor);
    /// Optionally replaces controls, then runs the pipeline.
    nlohmann::json evaluate(std::string_view id, const std::optional<nlohmann::json>& inventory,
                            const std::string& actor);
    /// body: {"signoff"?}
    nlohmann::json report(std::string_view id, const nlohmann::json& body, const std::string& actor);

    /// A copy of the current register.
    registry::RiskRegister snapshot() const;

private:
    registry::Assessment copy_of(std::string_view id) const;
    std::shared_ptr<std::mutex> writer_lock(const std::string& id);
    void commit(registry::Assessment a, const std::string& actor, const std::string& action);
    void persist_locked() const;

    GatewayConfig config_;
    registry::Clock clock_;
    scoring::Rubric rubric_;
    effectiveness::ScoreMatrix matrix_;

    mutable std::shared_mutex mutex_;
    registry::RiskRegister register_;

    std::mutex locks_mutex_;
    std::map<std::string, std::shared_ptr<std::mutex>> writer_locks_;
};

/// Parses "KIND=PATH" into a catalog input read from disk. IoError when unreadable.
CatalogInput read_catalog(std::string_view spec);
CatalogInput read_catalog(kb::CatalogKind kind, const std::string& path);

/// Reads a JSON file. IoError when unreadable, ParseError when malformed.
nlohmann::json read_json_file(const std::string& path);

} // namespace tibsa::gateway
