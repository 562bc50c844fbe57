// Copyright 2026 The WhatIf Authors.
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


#include <cmath>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "benchmark/benchmark.h"
#include "whatif/builtin_model.h"
#include "whatif/counterfactual.h"
#include "whatif/dataset.h"
#include "whatif/fairness.h"
#include "whatif/metrics.h"
#include "whatif/model_registry.h"
#include "whatif/pdp.h"

namespace whatif {
namespace {

struct Scored {
  std::vector<double> scores;
  std::vector<int> labels;
};

Scored MakeScored(size_t n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Scored s;
  for (size_t i = 0; i < n; ++i) {
    s.scores.push_back(u(rng));
    s.labels.push_back(u(rng) < s.scores.back() ? 1 : 0);
  }
  s.labels[0] = 0;
  s.labels[1] = 1;
  return s;
}

void BM_OptimizeSingleThreshold(benchmark::State& state) {
  const Scored s = MakeScored(state.range(0), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(OptimizeSingleThreshold(s.scores, s.labels));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_OptimizeSingleThreshold)->Range(500, 100000);

void BM_RocCurve(benchmark::State& state) {
  const Scored s = MakeScored(state.range(0), 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ComputeRocCurve(s.scores, s.labels));
  }
}
BENCHMARK(BM_RocCurve)->Range(500, 100000);

void BM_DemographicParity(benchmark::State& state) {
  std::vector<SliceScores> slices;
  for (int k = 0; k < 4; ++k) {
    Scored s = MakeScored(state.range(0), 10 + k);
    slices.push_back({"s" + std::to_string(k), s.scores, s.labels});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        OptimizeGroupThresholds(slices, FairnessStrategy::kDemographicParity));
  }
}
BENCHMARK(BM_DemographicParity)->Range(100, 10000)->Unit(benchmark::kMillisecond);

Dataset MakeMixed(size_t n) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<Value>> rows;
  for (size_t i = 0; i < n; ++i) {
    rows.push_back({Value{std::floor(u(rng) * 80) + 17}, Value{u(rng) * 60},
                    Value{u(rng) < 0.5 ? std::string("a") : std::string("b")}});
  }
  return *Dataset::Create({{"age", FeatureKind::kNumeric},
                           {"hours", FeatureKind::kNumeric},
                           {"group", FeatureKind::kCategorical}},
                          std::move(rows));
}

std::shared_ptr<const ModelHandle> MakeLinear() {
  BuiltinModelSpec spec;
  spec.task = TaskKind::Binary();
  spec.feature_order = {"age", "hours", "group"};
  spec.numeric_standardization["age"] = {50, 15};
  spec.numeric_standardization["hours"] = {30, 17};
  spec.categorical_vocab["group"] = {"a", "b"};
  spec.layers.push_back(
      DenseLayer{{{0.8, 0.5, -0.3, 0.3}}, {0.1}, Activation::kIdentity});
  spec.output = OutputTransform::kSigmoid;
  return std::make_shared<const ModelHandle>(
      ModelSlot::kModel1, "linear",
      std::shared_ptr<const Model>(*BuiltinModel::Create(spec)));
}

void BM_NearestCounterfactual(benchmark::State& state) {
  const Dataset ds = MakeMixed(state.range(0));
  const auto model = MakeLinear();
  std::vector<PredictionOutput> preds = *model->PredictDataset(ds);
  PointId anchor = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        NearestCounterfactual(ds, preds, anchor, DistanceNorm::kL1));
    anchor = (anchor + 1) % ds.size();
  }
}
BENCHMARK(BM_NearestCounterfactual)->Range(1000, 100000);

void BM_GlobalPdp(benchmark::State& state) {
  const Dataset ds = MakeMixed(state.range(0));
  const auto model = MakeLinear();
  const PdpModel models[] = {{model.get(), 0.5}};
  PdpSpec spec;
  spec.feature = "age";
  for (auto _ : state) {
    // Fresh cache each round so every prediction is computed.
    state.PauseTiming();
    model->ClearCache();
    state.ResumeTiming();
    absl::StatusOr<PdpCurve> curve = GlobalPdp(ds, models, spec);
    if (!curve.ok()) {
      state.SkipWithError(std::string(curve.status().message()).c_str());
      break;
    }
    benchmark::DoNotOptimize(curve);
  }
}
BENCHMARK(BM_GlobalPdp)->Range(1000, 10000)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace whatif
