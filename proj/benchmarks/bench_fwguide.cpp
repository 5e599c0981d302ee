#include <benchmark/benchmark.h>

#include <random>

#include "fwguide/analysis.hpp"
#include "fwguide/fw_oracle.hpp"
#include "fwguide/presets.hpp"
#include "fwguide/scenario.hpp"
#include "fwguide/world.hpp"

using namespace fwguide;

namespace {

BeaconSnapshot random_snapshot(int n, int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  BeaconSnapshot s;
  for (int i = 0; i < n; ++i) {
    Vec p(d);
    for (int k = 0; k < d; ++k) p[k] = u(rng);
    s.positions.push_back(p);
    s.weights.push_back(1.0 + 0.1 * i);
  }
  return s;
}

void BM_Weiszfeld(benchmark::State& state) {
  const BeaconSnapshot field = random_snapshot(static_cast<int>(state.range(0)),
                                               static_cast<int>(state.range(1)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(weiszfeld(field));
}
BENCHMARK(BM_Weiszfeld)->Args({6, 2})->Args({8, 3})->Args({32, 3});

void BM_BruteForce(benchmark::State& state) {
  const BeaconSnapshot field = hexagon_field().snapshot(0.0);
  for (auto _ : state) benchmark::DoNotOptimize(brute_force(field, bounding_box(field, 0.5), 0.05, 20));
}
BENCHMARK(BM_BruteForce)->Unit(benchmark::kMillisecond);

void BM_Step(benchmark::State& state) {
  const Scenario s = preset(state.range(0) ? "sim2c" : "sim1c-smc");
  const SimConfig cfg = to_sim_config(s);
  AgentState st;
  st.p = cfg.p0;
  if (cfg.model == AgentModel::DoubleIntegrator) st.v = Vec::Zero(cfg.p0.size());
  st.controller = initial_controller_state(cfg.law, static_cast<int>(cfg.p0.size()));
  for (auto _ : state) benchmark::DoNotOptimize(step(st, cfg.law, cfg.field, cfg.dt));
}
BENCHMARK(BM_Step)->Arg(0)->Arg(1);

void BM_SimulatePreset(benchmark::State& state, const char* name) {
  const SimConfig cfg = to_sim_config(preset(name));
  for (auto _ : state) benchmark::DoNotOptimize(simulate(cfg));
}
BENCHMARK_CAPTURE(BM_SimulatePreset, sim1a_gradient, "sim1a-gradient")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SimulatePreset, sim2b, "sim2b")->Unit(benchmark::kMillisecond);

void BM_Certify(benchmark::State& state) {
  const Scenario s = preset("sim1a-noisy");
  const SimConfig cfg = to_sim_config(s);
  const AnalysisContext ctx = make_context(cfg);
  Trajectory tr = simulate(cfg);
  attach_lyapunov(tr, ctx);
  for (auto _ : state) benchmark::DoNotOptimize(certify(tr, ctx, s.certificate));
}
BENCHMARK(BM_Certify)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
