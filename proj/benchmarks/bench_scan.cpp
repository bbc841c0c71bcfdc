#include <benchmark/benchmark.h>

#include "ek/verify.hpp"

namespace {

void BM_conjugate_scan(benchmark::State& state) {
  auto cert = ek::conjugate_lower_bound(ek::Int(1), ek::Int(0), ek::Int(-2), 7);
  for (auto _ : state) {
    auto res = ek::scan_certify_conjugate(cert, state.range(0), 3, 1);
    benchmark::DoNotOptimize(res.pairs_checked);
  }
}
BENCHMARK(BM_conjugate_scan)->Arg(100)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_generic_scan(benchmark::State& state) {
  ek::RealSpec alpha = ek::RealSpec::rational(ek::Rat(1));
  ek::PadicSpec beta = ek::PadicSpec::quad(-1, ek::Rat(0), ek::Rat(1), ek::Int(2));
  ek::ScanOptions opt;
  for (auto _ : state) {
    auto rows = ek::scan_records(alpha, beta, 5, state.range(0),
                                 ek::ScanStrategy::Exhaustive, opt);
    benchmark::DoNotOptimize(rows.size());
  }
}
BENCHMARK(BM_generic_scan)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
