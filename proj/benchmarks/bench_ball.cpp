#include <benchmark/benchmark.h>

#include "ek/quad.hpp"

namespace {

void BM_adaptive_log_refine(benchmark::State& state) {
  ek::QuadElem w(2, ek::Rat(3), ek::Rat(2));
  ek::AdaptiveReal L = w.to_real().log();
  for (auto _ : state) {
    benchmark::DoNotOptimize(L.refine(state.range(0), -4096).prec());
  }
}
BENCHMARK(BM_adaptive_log_refine)->Arg(64)->Arg(512)->Arg(2048);

void BM_ball_pow(benchmark::State& state) {
  ek::QuadElem w(2, ek::Rat(3), ek::Rat(2));
  ek::RealBall b = w.to_real().eval(256);
  for (auto _ : state) {
    benchmark::DoNotOptimize(b.pow_si(state.range(0)).approx());
  }
}
BENCHMARK(BM_ball_pow)->Arg(100)->Arg(100000)->Arg(1000000000);

}  // namespace
