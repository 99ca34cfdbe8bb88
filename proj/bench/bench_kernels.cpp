/* Copyright 2026 The fundscope Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 */


// Serial reference path against the OpenMP path for the parallel kernels.

#include <benchmark/benchmark.h>

#include <random>

#include "fundscope/forest.hpp"
#include "fundscope/screening.hpp"
#include "fundscope/synth.hpp"
#include "fundscope/text.hpp"

using namespace fundscope;

namespace {

Execution exec_of(const benchmark::State& state) {
  return state.range(0) ? Execution::Parallel : Execution::Serial;
}

const synth::SyntheticDataset& dataset() {
  static const synth::SyntheticDataset d = [] {
    synth::SyntheticSpec spec;
    spec.cells = {{GoalBand::B1, "Medical, Illness & Healing", 2000}};
    spec.effects = {{"liwc_insight", -0.3, 0.05, std::nullopt, ""}};
    return synth::generate_synthetic(spec, text::load_lexicon(FUNDSCOPE_DATA_DIR "/demo_lexicon.dic"),
                                     CategoryRegistry::builtin(), 1);
  }();
  return d;
}

void BM_ForestFit(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z;
  const std::size_t n = 1000, d = 30;
  forest::Matrix x(n, d);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = i % 2 ? 2 : -2;
    for (std::size_t j = 0; j < d; ++j) x(i, j) = z(rng) + (j < 3 ? 0.5 * y[i] : 0.0);
  }
  forest::ForestConfig cfg;
  cfg.n_estimators = 64;
  cfg.seed = 9;
  for (auto _ : state) {
    auto rf = forest::RandomForest::fit(x, y, cfg, exec_of(state));
    benchmark::DoNotOptimize(rf);
  }
}
BENCHMARK(BM_ForestFit)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_Screen(benchmark::State& state) {
  const auto& d = dataset();
  for (auto _ : state) {
    auto res = screening::screen(d.features, d.ratios, GoalBand::B1, "Medical, Illness & Healing", Modality::Text,
                                 0.05, exec_of(state));
    benchmark::DoNotOptimize(res);
  }
}
BENCHMARK(BM_Screen)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_TextFeaturize(benchmark::State& state) {
  const auto& d = dataset();
  static const text::Lexicon lex = text::load_lexicon(FUNDSCOPE_DATA_DIR "/demo_lexicon.dic");
  for (auto _ : state) {
    auto rows = text::featurize(d.campaigns, lex, exec_of(state));
    benchmark::DoNotOptimize(rows);
  }
}
BENCHMARK(BM_TextFeaturize)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
