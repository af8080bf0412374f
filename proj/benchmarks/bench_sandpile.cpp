// Copyright 2026 The smashlab Authors.
// SPDX-License-Identifier: Apache-2.0

#include <vector>

#include <benchmark/benchmark.h>

#include "smashlab/geometry.hpp"
#include "smashlab/quadrature.hpp"
#include "smashlab/sandpile.hpp"
#include "smashlab/smashgame.hpp"

using namespace smashlab;

namespace {

std::vector<Mask> overlapping_disks(double h)
{
    std::vector<ShapeExpr> const shapes{make_ball(2, {-0.5, 0, 0}, 1), make_ball(2, {0.5, 0, 0}, 1)};
    GridSpec const g = working_grid(shapes, h, SizingPolicy::compact);
    return {rasterize(shapes[0], g), rasterize(shapes[1], g)};
}

// Arg: 1/h.
void BM_SmashSum(benchmark::State& state)
{
    auto const parts = overlapping_disks(1.0 / static_cast<double>(state.range(0)));
    StabilizeParams params;
    params.threads = 1;
    long sweeps = 0;
    for (auto _ : state)
    {
        SumResult r = smash_masks(parts, params);
        sweeps = r.sweeps;
        benchmark::DoNotOptimize(r.domain);
    }
    state.counters["sweeps"] = static_cast<double>(sweeps);
    state.counters["cells"] = static_cast<double>(parts[0].size());
}
BENCHMARK(BM_SmashSum)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_SmashSumThreeDim(benchmark::State& state)
{
    double const h = 1.0 / static_cast<double>(state.range(0));
    std::vector<ShapeExpr> const shapes{make_ball(3, {0, 0, 0}, 1), make_ball(3, {0, 0, 0}, 1)};
    GridSpec const g = working_grid(shapes, h, SizingPolicy::compact);
    std::vector<Mask> const parts{rasterize(shapes[0], g), rasterize(shapes[1], g)};
    for (auto _ : state)
        benchmark::DoNotOptimize(smash_masks(parts).domain);
}
BENCHMARK(BM_SmashSumThreeDim)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_Inflate(benchmark::State& state)
{
    auto const parts = overlapping_disks(1.0 / static_cast<double>(state.range(0)));
    Mask const m = parts[0] | parts[1];
    for (auto _ : state)
        benchmark::DoNotOptimize(inflate(m, 0.25));
}
BENCHMARK(BM_Inflate)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_SlackStandardFunctions(benchmark::State& state)
{
    auto const parts = overlapping_disks(1.0 / 64);
    SumResult const sum = smash_masks(parts);
    DensityField w(sum.domain.grid());
    w.add(parts[0].regrid(w.grid()));
    w.add(parts[1].regrid(w.grid()));
    auto const fns = standard_test_functions(sum.domain);
    for (auto _ : state)
    {
        double total = 0;
        for (auto const& s : fns)
            total += quadrature_slack(sum.domain, w, s);
        benchmark::DoNotOptimize(total);
    }
}
BENCHMARK(BM_SlackStandardFunctions)->Unit(benchmark::kMillisecond);

void BM_GameDistantBalls(benchmark::State& state)
{
    auto const a = make_ball(2, {-2, 0, 0}, 0.5);
    auto const b = make_ball(2, {2, 0, 0}, 0.5);
    auto const s = TestFunction::mollified_newton(2, {1000, 0, 0}, 0.25);
    GameOptions o;
    o.delta = 100;
    for (auto _ : state)
        benchmark::DoNotOptimize(run_strategy(a, b, s, 1.0 / 64, o).rounds);
}
BENCHMARK(BM_GameDistantBalls)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
