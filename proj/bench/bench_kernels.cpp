/**
 * Copyright 2026 The shiftsearch Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Serial reference loops against their OpenMP counterparts. Arg 0 is serial, 1 parallel.

#include <benchmark/benchmark.h>

#include "shiftsearch/batch.hpp"
#include "shiftsearch/dataset.hpp"
#include "shiftsearch/mlp.hpp"
#include "shiftsearch/oracle.hpp"
#include "shiftsearch/transform_space.hpp"

using namespace shiftsearch;

namespace {

const LabeledDataset& data() {
  static const LabeledDataset d = [] {
    Rng gen(1);
    return make_synthetic_dataset(10, 50, 32, gen);
  }();
  return d;
}

const Mlp& model() {
  static const Mlp m = [] {
    MlpArchitecture arch;
    arch.hidden = {128};
    return Mlp(arch, 2);
  }();
  return m;
}

Execution exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

const Tuple& sample() {
  static const Tuple t =
      TransformSet::preset("mnist").parse_tuple("autocontrast@4+sharpness@15+enhance_g@22");
  return t;
}

void BM_ApplyTupleBatch(benchmark::State& state) {
  const auto exec = exec_of(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(apply_tuple_batch(sample(), data().images(), exec));
  }
  state.SetItemsProcessed(state.iterations() * data().size());
}

void BM_PredictBatch(benchmark::State& state) {
  const auto exec = exec_of(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(model().predict_batch(data().images(), exec));
  }
  state.SetItemsProcessed(state.iterations() * data().size());
}

void BM_Fitness(benchmark::State& state) {
  const auto exec = exec_of(state);
  BuiltinOracle oracle(model());
  oracle.set_execution(exec);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fitness(oracle, sample(), data(), exec));
  }
  state.SetItemsProcessed(state.iterations() * data().size());
}

void BM_TrainGradient(benchmark::State& state) {
  const auto exec = exec_of(state);
  std::vector<double> grad(model().weights().size());
  const auto images = data().images().first(32);
  const auto labels = data().labels().first(32);
  for (auto _ : state) {
    benchmark::DoNotOptimize(model().loss_and_gradient(images, labels, grad, exec));
  }
  state.SetItemsProcessed(state.iterations() * 32);
}

}  // namespace

BENCHMARK(BM_ApplyTupleBatch)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_PredictBatch)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Fitness)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_TrainGradient)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
