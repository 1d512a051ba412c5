// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors

#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tibsa/assessment.hpp"
#include "tibsa/causal_graph.hpp"
#include "tibsa/effectiveness.hpp"
#include "tibsa/kb.hpp"
#include "tibsa/scoring.hpp"

namespace tibsa::testing {

inline std::filesystem::path fixture_path(const std::string& name, const std::string& file) {
    return std::filesystem::path(TIBSA_FIXTURES_DIR) / name / file;
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("missing fixture " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline nlohmann::json read_json(const std::string& name, const std::string& file) {
    return nlohmann::json::parse(read_text(fixture_path(name, file)));
}

struct Fixture {
    kb::KnowledgeBase kb;
    graph::CtiReport cti;
    graph::LandscapeInventory landscape;
    effectiveness::ControlInventory controls;
    std::vector<scoring::AssessorScore> scores;
};

inline Fixture load_fixture(const std::string& name) {
    Fixture f;
    f.kb = kb::ingest_catalog(read_text(fixture_path(name, "techniques.json")), kb::CatalogKind::Techniques,
                              name + "/techniques.json");
    f.cti = graph::parse_cti(read_json(name, "cti.json"));
    f.landscape = graph::parse_landscape(read_json(name, "landscape.json"));
    if (std::filesystem::exists(fixture_path(name, "controls.json"))) {
        f.controls = effectiveness::parse_inventory(read_json(name, "controls.json"));
    }
    if (std::filesystem::exists(fixture_path(name, "scores.json"))) {
        const auto doc = read_json(name, "scores.json");
        for (const auto& s : doc.at("scores")) f.scores.push_back(scoring::parse_score(s));
    }
    return f;
}

inline registry::Clock fixed_clock(std::string at = "2026-03-01T09:00:00Z") {
    return [at] { return at; };
}

/// Fixture assessment carried through scoring, controls and the pipeline.
inline registry::Assessment evaluated_assessment(const std::string& name, registry::Mode mode = registry::Mode::Full) {
    auto f = load_fixture(name);
    registry::CreateOptions options;
    options.clock = fixed_clock();
    auto a = registry::create_assessment(name, mode, f.kb, f.cti, f.landscape, scoring::default_rubric(), options);
    std::vector<scoring::AssessorScore> scoped;
    for (const auto& s : f.scores) {
        if (std::find(a.scoped_ttps.begin(), a.scoped_ttps.end(), s.ttp_id) != a.scoped_ttps.end()) scoped.push_back(s);
    }
    registry::submit_scores(a, scoped, options.clock);
    registry::set_controls(a, f.controls, options.clock);
    registry::run_pipeline(a, options.clock);
    return a;
}

} // namespace tibsa::testing
