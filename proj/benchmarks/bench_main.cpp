// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "stickform/alpha_shape.h"
#include "stickform/chamfer.h"
#include "stickform/fit.h"
#include "stickform/marching_cubes.h"
#include "stickform/metrics.h"
#include "stickform/raster.h"
#include "stickform/sdf.h"

namespace stickform {
namespace {

TemplateConfig demo()
{
    std::ifstream in(STICKFORM_DEMO_TEMPLATE);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_template(ss.str());
}

std::vector<Vec3> cloud(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Vec3> out(n);
    for (Vec3& p : out) p = {u(rng), u(rng), u(rng)};
    return out;
}

void BM_Chamfer(benchmark::State& state)
{
    const auto n = std::size_t(state.range(0));
    const auto p = cloud(n, 1), q = cloud(n, 2);
    for (auto _ : state) benchmark::DoNotOptimize(chamfer(p, q));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Chamfer)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

void BM_Evaluate(benchmark::State& state)
{
    const TemplateConfig t = demo();
    const ParameterVector a = random_sample(t, 3, 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(evaluate(t, a));
}
BENCHMARK(BM_Evaluate);

void BM_LossAndGrad(benchmark::State& state)
{
    const TemplateConfig t = demo();
    const PointCloud target = sample_structure(evaluate(t, random_sample(t, 4, 0.5)), 4096, 5);
    FitConfig cfg;
    cfg.points_per_structure = std::size_t(state.range(0));
    const ParameterVector a = default_params(t);
    for (auto _ : state) benchmark::DoNotOptimize(loss_and_grad(t, a, target, cfg));
}
BENCHMARK(BM_LossAndGrad)->Arg(256)->Arg(1024)->Arg(4096);

void BM_MeshStructure(benchmark::State& state)
{
    const TemplateConfig t = demo();
    const StructureInstance s = evaluate(t, default_params(t));
    const std::vector<Detail> d(s.size());
    GridOptions opt;
    opt.resolution = int(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(mesh_structure(s, d, opt));
}
BENCHMARK(BM_MeshStructure)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_AlphaShape(benchmark::State& state)
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Vec2> pts;
    while (pts.size() < std::size_t(state.range(0))) {
        const Vec2 p{u(rng), u(rng)};
        const double r = std::hypot(p.u - 0.5, p.v - 0.5);
        if (r >= 0.2 && r <= 0.45) pts.push_back(p);
    }
    for (auto _ : state) benchmark::DoNotOptimize(alpha_shape(pts));
}
BENCHMARK(BM_AlphaShape)->RangeMultiplier(4)->Range(64, 4096);

void BM_RasterTrace(benchmark::State& state)
{
    ViewPolygon p;
    Ring r;
    for (int k = 0; k < 24; ++k) {
        const double th = 2 * M_PI * k / 24;
        r.push_back({0.5 + 0.4 * std::cos(th), 0.5 + 0.4 * std::sin(th)});
    }
    p.outer.push_back(r);
    p = normalized(p);
    for (auto _ : state) benchmark::DoNotOptimize(trace(rasterize(p)));
}
BENCHMARK(BM_RasterTrace);

}  // namespace
}  // namespace stickform

BENCHMARK_MAIN();
