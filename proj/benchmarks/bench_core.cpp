#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "hpccarbon/carbon_intensity.hpp"
#include "hpccarbon/component_carbon.hpp"
#include "hpccarbon/registry.hpp"
#include "hpccarbon/system_composition.hpp"
#include "hpccarbon/upgrade_advisor.hpp"

namespace {

using namespace hpccarbon;

ComponentRecord gpu_record() {
  ComponentRecord record;
  record.id = "bench-gpu";
  record.kind = ComponentKind::Gpu;
  ProcessorDieSpec die;
  die.die_area_cm2 = 8.0;
  die.fpa_g_per_cm2 = 300.0;
  die.gpa_g_per_cm2 = 200.0;
  die.mpa_g_per_cm2 = 100.0;
  die.fab_yield = 0.875;
  die.ic_count = 20;
  record.spec = die;
  record.peak_fp64_tflops = 9.7;
  return record;
}

ComponentRecord capacity_record(std::string id, ComponentKind kind, double capacity_gb,
                                double epc) {
  ComponentRecord record;
  record.id = std::move(id);
  record.kind = kind;
  CapacityDeviceSpec spec;
  spec.capacity_gb = capacity_gb;
  spec.epc_g_per_gb = epc;
  spec.packaging = PerIcPackaging{4};
  record.spec = spec;
  return record;
}

Registry bench_registry() {
  return Registry::from_records({
      gpu_record(),
      capacity_record("bench-dram", ComponentKind::Dram, 64.0, 65.0),
      capacity_record("bench-ssd", ComponentKind::Ssd, 3200.0, 6.21),
      capacity_record("bench-hdd", ComponentKind::Hdd, 16000.0, 1.33),
  });
}

IntensityTrace year_trace(std::string region, std::uint64_t seed, int offset_minutes) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> value(20.0, 600.0);
  IntensityTrace trace;
  trace.region_id = std::move(region);
  trace.utc_offset_minutes = offset_minutes;
  trace.samples.reserve(24 * 365);
  for (std::int64_t h = 0; h < 24 * 365; ++h)
    trace.samples.push_back(IntensitySample{h * 3600, value(rng)});
  return trace;
}

void BM_embodied(benchmark::State& state) {
  const ComponentRecord record = gpu_record();
  for (auto _ : state)
    benchmark::DoNotOptimize(embodied(record));
}
BENCHMARK(BM_embodied);

void BM_system_embodied(benchmark::State& state) {
  const Registry registry = bench_registry();
  SystemConfig config;
  config.name = "bench-node";
  config.pue = 1.3;
  config.items = {{"bench-gpu", 4}, {"bench-dram", 32}, {"bench-ssd", 8}, {"bench-hdd", 12}};
  for (auto _ : state)
    benchmark::DoNotOptimize(system_embodied(config, registry));
}
BENCHMARK(BM_system_embodied);

void BM_stats(benchmark::State& state) {
  const IntensityTrace trace = year_trace("bench", 17, 0);
  for (auto _ : state)
    benchmark::DoNotOptimize(stats(trace));
}
BENCHMARK(BM_stats);

void BM_hourly_winners(benchmark::State& state) {
  const std::vector<IntensityTrace> traces = {
      year_trace("east", 1, 0),
      year_trace("west", 2, -480),
      year_trace("north", 3, 60),
  };
  for (auto _ : state)
    benchmark::DoNotOptimize(hourly_winners(traces, 0));
}
BENCHMARK(BM_hourly_winners);

void BM_saving_curve(benchmark::State& state) {
  UpgradeScenario scenario;
  scenario.new_embodied_g = 150000.0;
  scenario.old_power = PowerModel{900.0, 150.0, 4, 1.2};
  scenario.new_power = PowerModel{600.0, 90.0, 4, 1.2};
  scenario.pattern = UsagePattern{0.40, 1.0};
  scenario.perf_improvement = 0.25;
  scenario.intensity = year_trace("grid", 4, 0);
  scenario.horizon_years = 5.0;
  for (auto _ : state)
    benchmark::DoNotOptimize(saving_curve(scenario, 12));
}
BENCHMARK(BM_saving_curve);

} // namespace

BENCHMARK_MAIN();
