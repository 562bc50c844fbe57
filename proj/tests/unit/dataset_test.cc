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

#include <atomic>
#include <cmath>
#include <thread>

#include "gtest/gtest.h"
#include "oracles/oracles.h"
#include "test_util.h"
#include "whatif/binning.h"
#include "whatif/dataset.h"
#include "whatif/statistics.h"
#include "whatif/versioned_dataset.h"

namespace whatif {
namespace {

using testing::Cat;
using testing::MakeDataset;
using testing::Num;

Dataset Small() {
  return MakeDataset({Num("age"), Cat("sex")},
                     {{Value{20.0}, Value{std::string("F")}},
                      {Value{30.0}, Value{std::string("M")}},
                      {Value{40.0}, Value{}}});
}

TEST(DatasetTest, CreateRejectsBadRows) {
  EXPECT_FALSE(Dataset::Create({Num("a")}, {{Value{1.0}, Value{2.0}}}).ok());
  EXPECT_FALSE(Dataset::Create({Num("a")}, {{Value{std::string("x")}}}).ok());
  EXPECT_FALSE(Dataset::Create({Num("a"), Num("a")}, {}).ok());
}

TEST(DatasetTest, EditKeepsIdAndValidatesTypes) {
  Dataset ds = Small();
  ASSERT_OK_AND_ASSIGN(DataPoint p, ds.Edit(1, {{"age", Value{31.0}}}));
  EXPECT_EQ(p.id, 1u);
  EXPECT_EQ(p.origin.kind, PointOrigin::Kind::kEdited);
  EXPECT_EQ(std::get<double>(ds.point(1).values[0]), 31.0);
  EXPECT_EQ(ds.Edit(1, {{"age", Value{std::string("old")}}}).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(ds.Edit(1, {{"height", Value{1.0}}}).status().code(),
            absl::StatusCode::kNotFound);
  EXPECT_EQ(ds.Edit(99, {{"age", Value{1.0}}}).status().code(),
            absl::StatusCode::kNotFound);
  // A failed multi-field edit leaves the point untouched.
  EXPECT_FALSE(ds.Edit(0, {{"age", Value{5.0}}, {"sex", Value{1.0}}}).ok());
  EXPECT_EQ(std::get<double>(ds.point(0).values[0]), 20.0);
}

TEST(DatasetTest, DuplicateAssignsFreshIdAndRecordsSource) {
  Dataset ds = Small();
  ASSERT_OK_AND_ASSIGN(DataPoint copy, ds.Duplicate(0));
  EXPECT_EQ(copy.id, 3u);
  EXPECT_EQ(copy.origin.kind, PointOrigin::Kind::kDuplicated);
  EXPECT_EQ(copy.origin.source, PointId{0});
  EXPECT_EQ(ds.size(), 4u);
  ASSERT_OK(ds.Delete(3));
  // Ids are never reused after a delete.
  ASSERT_OK_AND_ASSIGN(DataPoint again, ds.Duplicate(0));
  EXPECT_EQ(again.id, 4u);
}

TEST(DatasetTest, DeleteRemovesPoint) {
  Dataset ds = Small();
  ASSERT_OK(ds.Delete(1));
  EXPECT_EQ(ds.size(), 2u);
  EXPECT_FALSE(ds.Find(1).ok());
  EXPECT_EQ(ds.Delete(1).code(), absl::StatusCode::kNotFound);
}

TEST(DatasetTest, StatisticsRefreshAfterMutation) {
  Dataset ds = Small();
  EXPECT_EQ(ds.statistics()[0].numeric->max, 40.0);
  ASSERT_OK(ds.Edit(2, {{"age", Value{90.0}}}).status());
  EXPECT_EQ(ds.statistics()[0].numeric->max, 90.0);
}

TEST(DatasetTest, DerivedFeatureNamesAreUnique) {
  Dataset ds = Small();
  EXPECT_EQ(ds.AddDerivedFeature("d", {{0, 1.0}}), "d");
  EXPECT_EQ(ds.AddDerivedFeature("d", {{0, 2.0}}), "d_v2");
  EXPECT_EQ(ds.AddDerivedFeature("age", {}), "age_v2");
  EXPECT_EQ(ds.num_features(), 2u);
  ASSERT_NE(ds.FindDerived("d_v2"), nullptr);
  EXPECT_EQ(ds.FindDerived("d_v2")->values.at(0), 2.0);
}

TEST(StatisticsTest, NumericClosedForm) {
  std::vector<double> xs = {1, 2, 2, 3, 7, 0, 0, 11.5};
  std::vector<std::vector<Value>> rows;
  for (double x : xs) rows.push_back({Value{x}});
  rows.push_back({Value{}});
  Dataset ds = MakeDataset({Num("x")}, rows);
  const FeatureStatistics& s = ds.statistics()[0];
  double mean = 0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  EXPECT_EQ(s.count, xs.size());
  EXPECT_EQ(s.schema.missing_count, 1u);
  EXPECT_EQ(s.schema.zero_count, 2u);
  EXPECT_EQ(s.schema.distinct_count, 6u);
  EXPECT_NEAR(s.numeric->mean, mean, 1e-12);
  EXPECT_NEAR(s.numeric->std, oracle::PopulationStd(xs), 1e-12);
  EXPECT_EQ(s.numeric->min, 0.0);
  EXPECT_EQ(s.numeric->max, 11.5);
  size_t total = 0;
  for (size_t c : s.numeric->histogram) total += c;
  EXPECT_EQ(total, xs.size());
  // The maximum lands in the last, closed bin.
  EXPECT_EQ(s.numeric->histogram.back(), 1u);
}

TEST(StatisticsTest, ConstantColumnHasZeroStd) {
  Dataset ds = MakeDataset({Num("x")}, {{Value{0.1}}, {Value{0.1}}, {Value{0.1}}});
  EXPECT_EQ(ds.statistics()[0].numeric->mean, 0.1);
  EXPECT_EQ(ds.statistics()[0].numeric->std, 0.0);
  EXPECT_EQ(ds.statistics()[0].non_uniformity, 1.0);
}

TEST(StatisticsTest, CategoricalCounts) {
  Dataset ds = MakeDataset({Cat("c")}, {{Value{std::string("b")}},
                                        {Value{std::string("a")}},
                                        {Value{std::string("b")}},
                                        {Value{}}});
  const FeatureStatistics& s = ds.statistics()[0];
  EXPECT_EQ(s.schema.distinct_count, 2u);
  EXPECT_EQ(s.schema.missing_count, 1u);
  EXPECT_EQ(s.categorical->most_frequent, "b");
  ASSERT_EQ(s.categorical->value_counts.size(), 2u);
  EXPECT_EQ(s.categorical->value_counts[0].second, 2u);
}

TEST(StatisticsTest, NonUniformityBounds) {
  std::vector<size_t> uniform = {5, 5, 5, 0};
  std::vector<size_t> skewed = {97, 1, 1, 1};
  std::vector<size_t> single = {0, 7, 0};
  EXPECT_EQ(NonUniformity(uniform), 0.0);
  EXPECT_EQ(NonUniformity(single), 1.0);
  const double nu = NonUniformity(skewed);
  EXPECT_GT(nu, 0.5);
  EXPECT_LT(nu, 1.0);
  std::vector<size_t> milder = {40, 20, 20, 20};
  EXPECT_LT(NonUniformity(milder), nu);
}

TEST(StatisticsTest, MostlyZeroFeatureRanksFirst) {
  std::vector<std::vector<Value>> rows;
  for (int i = 0; i < 100; ++i) {
    rows.push_back({Value{static_cast<double>(i % 10)},
                    Value{i < 90 ? 0.0 : 1000.0 + i}});
  }
  Dataset ds = MakeDataset({Num("spread"), Num("gain")}, rows);
  EXPECT_EQ(SortFeatures(ds.statistics(), FeatureSortKey::kNonUniformity).front(),
            "gain");
  EXPECT_EQ(SortFeatures(ds.statistics(), FeatureSortKey::kMissingOrZeroCount)
                .front(),
            "gain");
  EXPECT_EQ(SortFeatures(ds.statistics(), FeatureSortKey::kAlphabetical).front(),
            "gain");
}

TEST(StatisticsTest, DisplayModeSwitchesAboveTwentyDistinct) {
  for (size_t k : {20u, 21u}) {
    std::vector<std::vector<Value>> rows;
    for (size_t i = 0; i < k; ++i) rows.push_back({Value{static_cast<double>(i)}});
    Dataset ds = MakeDataset({Num("x")}, rows);
    EXPECT_EQ(ds.statistics()[0].display_mode,
              k <= 20 ? DisplayMode::kHistogram : DisplayMode::kCdfLine);
  }
}

TEST(StatisticsTest, UniformBinIndexEdges) {
  EXPECT_EQ(UniformBinIndex(0.0, 0.0, 10.0, 10), 0u);
  EXPECT_EQ(UniformBinIndex(10.0, 0.0, 10.0, 10), 9u);
  EXPECT_EQ(UniformBinIndex(5.0, 0.0, 10.0, 10), 5u);
  EXPECT_EQ(UniformBinIndex(4.999, 0.0, 10.0, 10), 4u);
  EXPECT_EQ(UniformBinIndex(3.0, 3.0, 3.0, 10), 9u);
}

TEST(BinningTest, NumericAndCategoricalAxes) {
  Dataset ds = Small();
  BinningSpec spec;
  spec.x_feature = "age";
  spec.y_feature = "sex";
  spec.numeric_bin_count = 2;
  ASSERT_OK_AND_ASSIGN(BinLayout layout, AssignBins(ds, spec));
  EXPECT_EQ(layout.x.labels,
            (std::vector<std::string>{"[20, 30)", "[30, 40]"}));
  EXPECT_EQ(layout.y.labels,
            (std::vector<std::string>{"F", "M", std::string(kMissingBinLabel)}));
  EXPECT_EQ(layout.points[0].x_bin, 0u);
  EXPECT_EQ(layout.points[1].x_bin, 1u);
  EXPECT_EQ(layout.points[2].x_bin, 1u);
  EXPECT_EQ(layout.points[2].y_bin, 2u);
}

TEST(BinningTest, UnboundAxisIsSingleBin) {
  ASSERT_OK_AND_ASSIGN(BinLayout layout, AssignBins(Small(), BinningSpec{}));
  EXPECT_EQ(layout.x.labels, std::vector<std::string>{"all"});
  for (const PointBins& p : layout.points) EXPECT_EQ(p.x_bin, 0u);
}

TEST(BinningTest, ErrorsAndModelFields) {
  BinningSpec same;
  same.x_feature = "age";
  same.y_feature = "age";
  EXPECT_EQ(AssignBins(Small(), same).status().code(),
            absl::StatusCode::kInvalidArgument);
  BinningSpec unknown;
  unknown.x_feature = "height";
  EXPECT_EQ(AssignBins(Small(), unknown).status().code(),
            absl::StatusCode::kNotFound);

  ModelFields fields;
  fields["model1.correct"] = {Value{std::string("correct")},
                              Value{std::string("incorrect")},
                              Value{std::string("correct")}};
  BinningSpec by_model;
  by_model.x_feature = "model1.correct";
  by_model.color_feature = "sex";
  ASSERT_OK_AND_ASSIGN(BinLayout layout, AssignBins(Small(), by_model, fields));
  EXPECT_EQ(layout.x.labels, (std::vector<std::string>{"correct", "incorrect"}));
  EXPECT_EQ(layout.points[1].x_bin, 1u);
  EXPECT_EQ(layout.points[2].color_key, kMissingBinLabel);
}

TEST(VersionedDatasetTest, SnapshotsAreStableAcrossMutations) {
  VersionedDataset vd(Small());
  DatasetSnapshot before = vd.Snapshot();
  EXPECT_EQ(before.version, 0u);
  ASSERT_OK_AND_ASSIGN(auto edited, vd.Edit(0, {{"age", Value{99.0}}}));
  EXPECT_EQ(edited.first.version, 1u);
  EXPECT_EQ(std::get<double>(before.dataset->point(0).values[0]), 20.0);
  EXPECT_EQ(std::get<double>(vd.Snapshot().dataset->point(0).values[0]), 99.0);
  // Failed mutations do not bump the version.
  EXPECT_FALSE(vd.Delete(42).ok());
  EXPECT_EQ(vd.Snapshot().version, 1u);
}

TEST(VersionedDatasetTest, ConcurrentReadersSeeConsistentSnapshots) {
  VersionedDataset vd(Small());
  std::atomic<bool> stop{false};
  std::atomic<int> bad{0};
  std::thread reader([&] {
    while (!stop) {
      DatasetSnapshot s = vd.Snapshot();
      if (s.dataset->size() != 3u + s.version) ++bad;
    }
  });
  for (int i = 0; i < 200; ++i) ASSERT_OK(vd.Duplicate(0).status());
  stop = true;
  reader.join();
  EXPECT_EQ(bad.load(), 0);
  EXPECT_EQ(vd.Snapshot().dataset->size(), 203u);
}

}  // namespace
}  // namespace whatif
