#include <benchmark/benchmark.h>

#include "fairmpc/analysis.hpp"
#include "fairmpc/presets.hpp"
#include "fairmpc/sim.hpp"

namespace {

using namespace fairmpc;

Vector initial_state(const Scenario & sc)
{
  const int n = sc.state_dim();
  Vector x(n * sc.num_systems());
  for (int i = 0; i < sc.num_systems(); ++i) { x.segment(i * n, n) = sc.initial_states[i]; }
  return x;
}

void BM_AssembleOcp(benchmark::State & state, const char * preset)
{
  const auto sc = make_preset(preset);
  const Vector x0 = initial_state(sc);
  for (auto _ : state) { benchmark::DoNotOptimize(assemble_ocp(sc, x0, sc.budget.u_bar_0, sc.weights)); }
}

void BM_SolveFairMpc(benchmark::State & state, const char * preset)
{
  const auto sc = make_preset(preset);
  const auto inst = assemble_ocp(sc, initial_state(sc), sc.budget.u_bar_0, sc.weights);
  for (auto _ : state) { benchmark::DoNotOptimize(solve_fair_mpc(inst)); }
}

void BM_ClosedLoop(benchmark::State & state, const char * preset)
{
  const auto sc = make_preset(preset);
  for (auto _ : state) { benchmark::DoNotOptimize(run_closed_loop(sc)); }
}

void BM_Verification(benchmark::State & state)
{
  const auto sc = make_preset("two-system");
  for (auto _ : state) { benchmark::DoNotOptimize(run_verification(sc, static_cast<int>(state.range(0)), 0)); }
}

}  // namespace

BENCHMARK_CAPTURE(BM_AssembleOcp, two_system, "two-system")->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_AssembleOcp, motion_two_class, "motion-two-class")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SolveFairMpc, two_system, "two-system")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SolveFairMpc, motion_two_system, "motion-two-system")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SolveFairMpc, motion_two_class, "motion-two-class")->Unit(benchmark::kMillisecond)->Iterations(3);
BENCHMARK_CAPTURE(BM_ClosedLoop, two_system, "two-system")->Unit(benchmark::kMillisecond)->Iterations(2);
BENCHMARK(BM_Verification)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
