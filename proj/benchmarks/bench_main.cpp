#include <benchmark/benchmark.h>

#include <nilharmonics/group.hpp>
#include <nilharmonics/norm.hpp>
#include <nilharmonics/quadrature.hpp>
#include <nilharmonics/weak_l1.hpp>

namespace {

using namespace nilh;

void BM_HeisenbergMultiply(benchmark::State& state) {
    const GroupSpec H = GroupSpec::heisenberg();
    const double eta[3] = {0.3, -1.2, 0.7};
    double xi[3] = {1.1, 0.4, -0.2};
    double out[3];
    for (auto _ : state) {
        H.multiply_into(eta, xi, out);
        benchmark::DoNotOptimize(out);
        xi[0] = out[0] * 1e-3;
    }
}
BENCHMARK(BM_HeisenbergMultiply);

void BM_Norm(benchmark::State& state) {
    const HomogeneousNorm N(GroupSpec::heisenberg(), static_cast<NormVariant>(state.range(0)));
    double theta[3] = {0.3, -1.2, 0.7};
    for (auto _ : state) {
        benchmark::DoNotOptimize(N(theta));
        theta[2] += 1e-9;
    }
}
BENCHMARK(BM_Norm)->Arg(0)->Arg(1);

void BM_SphereRule(benchmark::State& state) {
    const HomogeneousNorm N(GroupSpec::heisenberg());
    for (auto _ : state) benchmark::DoNotOptimize(SphereRule::build(N, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_SphereRule)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_Irs(benchmark::State& state) {
    const HomogeneousNorm N(GroupSpec::heisenberg());
    const SphereRule sph = SphereRule::build(N, 12);
    const GroupElement eta = {2.0, 1.0, 3.0};
    for (auto _ : state) benchmark::DoNotOptimize(I_rs(N, sph, -5.0, -6.0, eta));
}
BENCHMARK(BM_Irs)->Unit(benchmark::kMillisecond);

void BM_BuildCovering(benchmark::State& state) {
    const HomogeneousNorm N(GroupSpec::abelian(1));
    AtomicMeasure nu;
    nu.atoms.push_back({{0.0}, 1.0});
    for (auto _ : state)
        benchmark::DoNotOptimize(build_covering(N, nu, 1.0, 0.1, 2, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_BuildCovering)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
