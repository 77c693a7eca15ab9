// Serial reference against the OpenMP kernel for each parallel hot spot.
#include <benchmark/benchmark.h>

#include "mdlab/bracket.hpp"
#include "mdlab/certificate.hpp"
#include "mdlab/family.hpp"
#include "mdlab/multiplier.hpp"

using namespace mdlab;

namespace {

Exec mode(const benchmark::State& s) { return s.range(0) ? Exec::Parallel : Exec::Serial; }

void BM_GramMatrix(benchmark::State& state) {
  auto f2 = make_free_group(2);
  const Ball b = f2->ball(5);
  const Multiplier phi = radial_multiplier(f2, cd(0.6, 0.2));
  for (auto _ : state) benchmark::DoNotOptimize(gram_matrix(phi, b.elements, mode(state)));
}

void BM_VerifyCertificate(benchmark::State& state) {
  auto z2 = make_zn(2);
  const Multiplier phi = folner_approximant(z2, 3);
  const auto c = folner_certificate(z2, 3, 2, 4);
  const Ball b = z2->ball(4);
  VerifyOptions opt;
  opt.exec = mode(state);
  for (auto _ : state) benchmark::DoNotOptimize(verify_certificate(c, phi, b, opt));
}

void BM_QuadratureAverage(benchmark::State& state) {
  auto f2 = make_free_group(2);
  const FejerParams p{64, 0.9};
  for (auto _ : state) benchmark::DoNotOptimize(fejer_quadrature(p, f2, mode(state)));
}

void BM_EmpiricalBound(benchmark::State& state) {
  FamilyPoint fp = tree_family_point(cd(0.5, 0.4), 5, 2);
  for (auto _ : state) benchmark::DoNotOptimize(empirical_bound(fp, mode(state)));
}

}  // namespace

BENCHMARK(BM_GramMatrix)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VerifyCertificate)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_QuadratureAverage)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EmpiricalBound)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
