// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors

#include <benchmark/benchmark.h>

#include <random>

#include "generators.hpp"

using namespace tibsa;

namespace {

// Layered campaign: `width` techniques per layer, each leading to every
// technique of the next layer, the last layer achieving the goal.
testing::Scenario layered(int layers, int width) {
    testing::Scenario s;
    s.cti.campaign_id = "bench";
    s.cti.actor = "X";
    s.cti.goals = {{"G", "goal"}};
    auto id = [](int l, int w) { return "T" + std::to_string(1000 + l * 100 + w); };
    for (int l = 0; l < layers; ++l) {
        for (int w = 0; w < width; ++w) {
            kb::TechniqueRecord t;
            t.id = id(l, w);
            t.name = t.id;
            t.tactic_ids = {"TA0001"};
            s.kb.add(std::move(t));
            graph::Evidence e;
            e.ttp_id = id(l, w);
            e.evidence_level = 3;
            e.confidence = 1 + (l + w) % 5;
            if (l + 1 < layers) {
                for (int n = 0; n < width; ++n) e.leads_to.push_back(id(l + 1, n));
            } else {
                e.achieves.push_back("G");
            }
            s.cti.evidence.push_back(std::move(e));
        }
    }
    return s;
}

void BM_EnumeratePaths(benchmark::State& state) {
    const auto s = layered(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    const auto g = graph::build_graph(s.kb, s.cti, s.landscape);
    for (auto _ : state) {
        auto paths = graph::enumerate_paths(g, "goal:G", graph::kDefaultMaxDepth, s.landscape);
        benchmark::DoNotOptimize(paths);
    }
}
BENCHMARK(BM_EnumeratePaths)->Args({3, 4})->Args({4, 5})->Args({5, 6});

void BM_BuildAndClassify(benchmark::State& state) {
    std::mt19937 rng(1);
    std::vector<testing::Scenario> scenarios;
    for (int i = 0; i < 64; ++i) scenarios.push_back(testing::random_scenario(rng, 12));
    std::size_t i = 0;
    for (auto _ : state) {
        const auto& s = scenarios[i++ % scenarios.size()];
        const auto g = graph::build_graph(s.kb, s.cti, s.landscape);
        auto classes = graph::classify_ttps(g, s.kb, s.cti, s.landscape);
        benchmark::DoNotOptimize(classes);
    }
}
BENCHMARK(BM_BuildAndClassify);

} // namespace
