// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors

#include <benchmark/benchmark.h>

#include <random>

#include "generators.hpp"

using namespace tibsa;

namespace {

void BM_Aggregate(benchmark::State& state) {
    std::mt19937 rng(4);
    const auto rubric = scoring::default_rubric();
    const auto scores = testing::random_scores(rng, rubric, {"T1000"}, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto agg = scoring::aggregate(rubric, scores);
        benchmark::DoNotOptimize(agg);
    }
}
BENCHMARK(BM_Aggregate)->Arg(2)->Arg(8)->Arg(64);

void BM_RankTtps(benchmark::State& state) {
    std::mt19937 rng(5);
    const auto rubric = scoring::default_rubric();
    std::vector<scoring::AggregatedScore> aggregates;
    for (int i = 0; i < state.range(0); ++i) {
        const auto scores = testing::random_scores(rng, rubric, {"T" + std::to_string(1000 + i)}, 3);
        aggregates.push_back(scoring::aggregate(rubric, scores));
    }
    for (auto _ : state) {
        auto ranked = scoring::rank_ttps(aggregates);
        benchmark::DoNotOptimize(ranked);
    }
}
BENCHMARK(BM_RankTtps)->Arg(16)->Arg(256);

} // namespace
