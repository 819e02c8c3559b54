#include <benchmark/benchmark.h>

#include "polcomp/analysis.hpp"
#include "polcomp/compensate.hpp"
#include "polcomp/photostream.hpp"

using namespace polcomp;

namespace {

CompensatedPath random_path(std::uint64_t seed) {
  CompensatedPath p;
  p.link = make_link("bench", 0.0, seed);
  return p;
}

StreamPair werner_streams(double duration_s) {
  Arm arm;
  arm.transmission = 0.3;
  const auto ev = generate_pairs(SourceModel{1e5, 0.933}, duration_s, 1);
  return detect_pair_events(ev, werner_state(0.933), MeasBasis::hv(),
                            MeasBasis::hv(), arm, arm, seconds_to_ps(duration_s), 2);
}

void BM_PaddleUnitary(benchmark::State& state) {
  PaddleController c({kPi / 2, kPi, kPi / 2}, {0.3, 1.2, 2.5});
  for (auto _ : state) {
    c.rotate(0, 1e-3);
    benchmark::DoNotOptimize(paddle_unitary(c));
  }
}
BENCHMARK(BM_PaddleUnitary);

void BM_OutcomeProbs(benchmark::State& state) {
  Rng rng(3);
  const auto rho = apply_local(haar_unitary(rng), haar_unitary(rng), werner_state(0.9));
  for (auto _ : state)
    benchmark::DoNotOptimize(outcome_probs(rho, MeasBasis::da(), MeasBasis::da()));
}
BENCHMARK(BM_OutcomeProbs);

void BM_DetectPairs(benchmark::State& state) {
  const auto ev = generate_pairs(SourceModel{1e5, 0.933}, 1.0, 1);
  Arm arm;
  arm.transmission = 0.3;
  for (auto _ : state)
    benchmark::DoNotOptimize(detect_pair_events(ev, werner_state(0.933),
                                                MeasBasis::hv(), MeasBasis::hv(),
                                                arm, arm, seconds_to_ps(1.0), 2));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ev.size()));
}
BENCHMARK(BM_DetectPairs)->Unit(benchmark::kMillisecond);

void BM_CrossCorrelate(benchmark::State& state) {
  const auto s = werner_streams(1.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(cross_correlate(s.a, s.b, 50, state.range(0)));
}
BENCHMARK(BM_CrossCorrelate)->Arg(100'000)->Arg(10'000'000)->Unit(benchmark::kMillisecond);

void BM_CountCoincidences(benchmark::State& state) {
  const auto s = werner_streams(1.0);
  const auto sched = BasisSchedule::constant(BasisLabel::HV, seconds_to_ps(1.0));
  for (auto _ : state)
    benchmark::DoNotOptimize(count_coincidences(s.a, s.b, 0, 500, sched));
}
BENCHMARK(BM_CountCoincidences)->Unit(benchmark::kMillisecond);

void BM_CompensateManual(benchmark::State& state) {
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto p = random_path(++seed);
    benchmark::DoNotOptimize(
        compensate_manual(p, {}, CostModel::for_method(Method::manual), seed));
  }
}
BENCHMARK(BM_CompensateManual)->Unit(benchmark::kMillisecond);

void BM_CompensateMpc(benchmark::State& state) {
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto p = random_path(++seed);
    benchmark::DoNotOptimize(compensate_mpc(p, {}, CostModel::for_method(Method::mpc), seed));
  }
}
BENCHMARK(BM_CompensateMpc)->Unit(benchmark::kMillisecond);

void BM_CompensateBlinking(benchmark::State& state) {
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto p = random_path(++seed);
    benchmark::DoNotOptimize(
        compensate_blinking(p, {}, CostModel::for_method(Method::blinking), seed));
  }
}
BENCHMARK(BM_CompensateBlinking)->Unit(benchmark::kMillisecond);

void BM_CompensateQber(benchmark::State& state) {
  std::uint64_t seed = 0;
  for (auto _ : state) {
    CompensatedPath a = random_path(++seed), b;
    a.side = b.side = ControllerSide::source;
    benchmark::DoNotOptimize(compensate_qber(a, b, SourceModel{}, QberConfig{},
                                             CostModel::for_method(Method::qber_min),
                                             seed));
  }
}
BENCHMARK(BM_CompensateQber)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
