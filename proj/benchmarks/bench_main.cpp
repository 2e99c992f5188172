#include <benchmark/benchmark.h>

#include "gmc/bde.hpp"
#include "gmc/flow.hpp"
#include "gmc/jets.hpp"
#include "gmc/models.hpp"
#include "gmc/umbilic.hpp"

using namespace gmc;

namespace {

const SurfaceChart& ellipsoid() {
    static const SurfaceChart E = orient_positive(SurfaceChart::ellipsoid_angular(3, 2, 1), {1.0, 0.5});
    return E;
}

void BM_FundamentalForms(benchmark::State& st) {
    const SurfaceChart& E = ellipsoid();
    for (auto _ : st) benchmark::DoNotOptimize(fundamental_forms(E, {1.0, 0.5}));
}
BENCHMARK(BM_FundamentalForms);

void BM_Directions(benchmark::State& st) {
    const FundamentalForms ff = fundamental_forms(ellipsoid(), {1.0, 0.5});
    const CurvatureData cd = curvature_data(ff);
    for (auto _ : st) benchmark::DoNotOptimize(gmc_directions(ff, cd));
}
BENCHMARK(BM_Directions);

void BM_Trace(benchmark::State& st) {
    TraceConfig cfg;
    cfg.max_arclength = static_cast<double>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(trace_gmc_line(ellipsoid(), {1.0, 0.5}, Branch::minimal, cfg));
}
BENCHMARK(BM_Trace)->Arg(1)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_ClassifyUmbilic(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(classify_gmc_umbilic(MongeJet3{1, 0, 1, 1}));
}
BENCHMARK(BM_ClassifyUmbilic);

void BM_TorusRho(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(torus_rho(0.33));
}
BENCHMARK(BM_TorusRho)->Unit(benchmark::kMicrosecond);

void BM_TorusRhoNumeric(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(torus_rho_numeric(0.33, 1.0));
}
BENCHMARK(BM_TorusRhoNumeric)->Unit(benchmark::kMicrosecond);

void BM_EllipsoidS1S2(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(ellipsoid_S1_S2(3, 2, 1));
}
BENCHMARK(BM_EllipsoidS1S2)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
