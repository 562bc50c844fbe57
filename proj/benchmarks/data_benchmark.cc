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


#include <random>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "benchmark/benchmark.h"
#include "whatif/dataset.h"
#include "whatif/ingest.h"
#include "whatif/statistics.h"

namespace whatif {
namespace {

// Ten numeric and five categorical columns.
std::string MakeCsv(size_t rows) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::string out;
  for (int f = 0; f < 10; ++f) absl::StrAppend(&out, "n", f, ",");
  out += "c0,c1,c2,c3,label\n";
  for (size_t i = 0; i < rows; ++i) {
    for (int f = 0; f < 10; ++f) {
      absl::StrAppend(&out, static_cast<int>(u(rng) * 1000) / 10.0, ",");
    }
    for (int c = 0; c < 4; ++c) {
      absl::StrAppend(&out, "v", static_cast<int>(u(rng) * 6), ",");
    }
    out += u(rng) < 0.3 ? "yes\n" : "no\n";
  }
  return out;
}

void BM_IngestCsv(benchmark::State& state) {
  const std::string csv = MakeCsv(state.range(0));
  for (auto _ : state) {
    absl::StatusOr<Dataset> ds = Ingest(csv, DataFormat::kCsv);
    benchmark::DoNotOptimize(ds);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.SetBytesProcessed(state.iterations() * csv.size());
}
BENCHMARK(BM_IngestCsv)->Arg(1000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_FeatureStatistics(benchmark::State& state) {
  const Dataset ds = *Ingest(MakeCsv(state.range(0)), DataFormat::kCsv);
  for (auto _ : state) {
    std::vector<FeatureStatistics> stats = ComputeFeatureStatistics(ds);
    benchmark::DoNotOptimize(stats);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FeatureStatistics)->Arg(1000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace whatif
