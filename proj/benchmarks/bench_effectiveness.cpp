// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors

#include <benchmark/benchmark.h>

#include <random>

#include "generators.hpp"

using namespace tibsa;

namespace {

std::vector<std::string> ttp_ids(int n) {
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) out.push_back("T" + std::to_string(1000 + i));
    return out;
}

void BM_EvaluateControls(benchmark::State& state) {
    std::mt19937 rng(2);
    effectiveness::ControlInventory inv;
    const auto ttps = ttp_ids(static_cast<int>(state.range(0)));
    for (int batch = 0; batch < 16; ++batch) {
        auto part = testing::random_inventory(rng, ttps);
        for (auto& c : part.controls) c.id += "-" + std::to_string(batch);
        for (auto& e : part.entries) e.control_id += "-" + std::to_string(batch);
        inv.controls.insert(inv.controls.end(), part.controls.begin(), part.controls.end());
        inv.entries.insert(inv.entries.end(), part.entries.begin(), part.entries.end());
    }
    for (auto _ : state) {
        auto evals = effectiveness::evaluate_controls(inv.controls, inv.entries);
        benchmark::DoNotOptimize(evals);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(inv.entries.size()));
}
BENCHMARK(BM_EvaluateControls)->Arg(8)->Arg(32)->Arg(128);

void BM_CoverageMatrixCsv(benchmark::State& state) {
    std::mt19937 rng(3);
    const auto ttps = ttp_ids(32);
    const auto inv = testing::random_inventory(rng, ttps);
    for (auto _ : state) {
        const auto m = effectiveness::coverage_matrix(inv.controls, inv.entries, ttps);
        auto csv = effectiveness::render_csv(m);
        benchmark::DoNotOptimize(csv);
    }
}
BENCHMARK(BM_CoverageMatrixCsv);

} // namespace
