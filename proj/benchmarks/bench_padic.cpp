#include <benchmark/benchmark.h>

#include "ek/padic.hpp"

namespace {

void BM_padic_log(benchmark::State& state) {
  long N = state.range(0);
  ek::PAdic z = ek::PAdic::from_int(1 + ek::Int(7) * 12345, 7, N);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ek::padic_log(z).valuation_lower());
  }
}
BENCHMARK(BM_padic_log)->Arg(20)->Arg(50)->Arg(200);

void BM_hensel_sqrt(benchmark::State& state) {
  long N = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ek::hensel_sqrt(ek::Int(2), 7, N).residue());
  }
}
BENCHMARK(BM_hensel_sqrt)->Arg(16)->Arg(64)->Arg(256);

void BM_padic_pow(benchmark::State& state) {
  ek::PAdic z = ek::hensel_sqrt(ek::Int(2), 7, 64);
  ek::Int e = ek::pow_long(7, 15);
  for (auto _ : state) {
    benchmark::DoNotOptimize(z.pow(e).valuation_lower());
  }
}
BENCHMARK(BM_padic_pow);

}  // namespace
