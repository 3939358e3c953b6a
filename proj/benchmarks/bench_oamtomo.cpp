// Copyright 2026 The oamtomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdint>
#include <vector>

#include <benchmark/benchmark.h>

#include "oamtomo/basis.hpp"
#include "oamtomo/calibration.hpp"
#include "oamtomo/hologram.hpp"
#include "oamtomo/measurement.hpp"
#include "oamtomo/mle.hpp"
#include "oamtomo/optics.hpp"

namespace {

using namespace oamtomo;

const EnlargedBasis& basis() {
  static const EnlargedBasis b = build_enlarged_basis(reference_grid());
  return b;
}

void BM_LgMode(benchmark::State& state) {
  const Grid g = reference_grid();
  for (auto _ : state) benchmark::DoNotOptimize(lg_mode({2, 1, 1.0}, g));
}
BENCHMARK(BM_LgMode)->Unit(benchmark::kMillisecond);

void BM_TransformOverlap(benchmark::State& state) {
  const Grid unit = make_grid(4.0, static_cast<int>(state.range(0)));
  const TransformSpec t = make_transform(0.3, -0.1, -0.2, 0.4, 0.3, -0.2);
  for (auto _ : state) benchmark::DoNotOptimize(transform_overlap(unit, 1.1, t));
}
BENCHMARK(BM_TransformOverlap)->Arg(48)->Arg(96)->Unit(benchmark::kMicrosecond);

void BM_ProjectorStates(benchmark::State& state) {
  const auto settings = default_settings(static_cast<int>(state.range(0)), 1);
  const auto transforms = transforms_of(settings);
  const EnlargedBasis& b = basis();
  for (auto _ : state) benchmark::DoNotOptimize(projector_states(transforms, b));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ProjectorStates)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_ModelCurve(benchmark::State& state) {
  const CalibrationParams params{800.0, 1.1, 0.12, -0.08, -0.1, 0.05, 0.3, -0.2};
  std::vector<double> positions;
  for (double x = -3.0; x <= 3.0 + 1e-12; x += 0.1) positions.push_back(x);
  const auto design = canonical_scan_design(positions);
  for (auto _ : state) benchmark::DoNotOptimize(model_curve(params, design.front()));
}
BENCHMARK(BM_ModelCurve)->Unit(benchmark::kMillisecond);

void BM_Reconstruct(benchmark::State& state) {
  const EnlargedBasis& b = basis();
  const auto settings = default_settings(static_cast<int>(state.range(0)), 1);
  const auto projectors = projector_states(transforms_of(settings), b);
  const auto bob = *named_bob_state("a");
  const DensityMatrix rho = remote_prepare(PreparationChoice::for_bob_state(bob));
  const auto records = simulate_counts(rho, settings, projectors, 500.0, 7);
  const MeasurementData data = make_measurement_data(projectors, records, b.dim());
  ReconstructionOptions options;
  options.max_iterations = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(reconstruct(data, options));
}
BENCHMARK(BM_Reconstruct)->Args({2400, 50})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
