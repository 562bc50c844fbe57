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

#include "gtest/gtest.h"
#include "oracles/oracles.h"
#include "test_util.h"
#include "whatif/fairness.h"

namespace whatif {
namespace {

SliceScores RandomSlice(std::mt19937& rng, const std::string& key, size_t n,
                        double base_rate, double shift) {
  SliceScores s;
  s.key = key;
  for (size_t i = 0; i < n; ++i) {
    const int label =
        std::uniform_real_distribution<double>(0, 1)(rng) < base_rate ? 1 : 0;
    double score = std::uniform_real_distribution<double>(0, 0.7)(rng) + shift;
    if (label) score = std::min(1.0, score + 0.15);
    s.scores.push_back(std::min(1.0, score));
    s.labels.push_back(label);
  }
  s.labels[0] = 0;
  s.labels[1] = 1;
  return s;
}

std::function<double(const oracle::Counts&)> OracleQuantity(FairnessStrategy s) {
  switch (s) {
    case FairnessStrategy::kEqualOpportunity:
      return [](const oracle::Counts& c) { return c.tpr(); };
    case FairnessStrategy::kEqualAccuracy:
      return [](const oracle::Counts& c) { return c.accuracy(); };
    default:
      return [](const oracle::Counts& c) { return c.positive_rate(); };
  }
}

TEST(StrategyTest, NamesRoundTrip) {
  for (FairnessStrategy s :
       {FairnessStrategy::kSingleThreshold, FairnessStrategy::kGroupThresholds,
        FairnessStrategy::kDemographicParity, FairnessStrategy::kEqualOpportunity,
        FairnessStrategy::kEqualAccuracy}) {
    ASSERT_OK_AND_ASSIGN(FairnessStrategy parsed, ParseStrategy(StrategyName(s)));
    EXPECT_EQ(parsed, s);
  }
  EXPECT_EQ(*ParseStrategy("Equal_Opportunity"), FairnessStrategy::kEqualOpportunity);
  EXPECT_FALSE(ParseStrategy("fair").ok());
}

TEST(GroupThresholdTest, SingleUsesOneThresholdEverywhere) {
  std::mt19937 rng(1);
  std::vector<SliceScores> slices = {RandomSlice(rng, "a", 20, 0.5, 0.1),
                                     RandomSlice(rng, "b", 25, 0.3, 0.0)};
  ASSERT_OK_AND_ASSIGN(auto r, OptimizeGroupThresholds(slices, FairnessStrategy::kSingleThreshold));
  ASSERT_TRUE(r.global_threshold);
  for (const SliceThreshold& s : r.slices) EXPECT_EQ(s.threshold, *r.global_threshold);
}

TEST(GroupThresholdTest, GroupIsIndependentPerSliceOptimum) {
  std::mt19937 rng(2);
  std::vector<SliceScores> slices = {RandomSlice(rng, "a", 30, 0.5, 0.1),
                                     RandomSlice(rng, "b", 30, 0.3, 0.0)};
  ASSERT_OK_AND_ASSIGN(CostRatio r, CostRatio::Create(2.0));
  ASSERT_OK_AND_ASSIGN(auto result,
                       OptimizeGroupThresholds(slices, FairnessStrategy::kGroupThresholds, r));
  for (size_t i = 0; i < slices.size(); ++i) {
    EXPECT_DOUBLE_EQ(result.slices[i].threshold,
                     oracle::CheapestThreshold(slices[i].scores, slices[i].labels, 2.0));
  }
  EXPECT_FALSE(result.global_threshold);
}

TEST(GroupThresholdTest, ParityStrategiesMatchProductSpaceOptimum) {
  std::mt19937 rng(9);
  for (FairnessStrategy strategy :
       {FairnessStrategy::kDemographicParity, FairnessStrategy::kEqualOpportunity,
        FairnessStrategy::kEqualAccuracy}) {
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<SliceScores> slices = {
          RandomSlice(rng, "a", 4 + rng() % 27, 0.6, 0.2),
          RandomSlice(rng, "b", 4 + rng() % 27, 0.3, 0.0)};
      ASSERT_OK_AND_ASSIGN(auto r, OptimizeGroupThresholds(slices, strategy));
      const double expected = oracle::ProductSpaceMinDisparity(
          slices[0].scores, slices[0].labels, slices[1].scores, slices[1].labels,
          OracleQuantity(strategy));
      EXPECT_NEAR(r.achieved_disparity, expected, 1e-9)
          << StrategyName(strategy) << " trial " << trial;
      ASSERT_TRUE(r.target);
      // The reported quantities belong to the chosen thresholds.
      for (size_t i = 0; i < 2; ++i) {
        const oracle::Counts c = oracle::CountAt(slices[i].scores, slices[i].labels,
                                                 r.slices[i].threshold);
        EXPECT_NEAR(r.slices[i].quantity, OracleQuantity(strategy)(c), 1e-12);
      }
    }
  }
}

TEST(GroupThresholdTest, DemographicParityWorkedExample) {
  // B is A shifted down by 0.3, so equal positive rates need t_A > t_B.
  SliceScores a{"A", {0.45, 0.55, 0.65, 0.75, 0.85, 0.95}, {0, 1, 1, 1, 0, 1}};
  SliceScores b{"B", {0.15, 0.25, 0.35, 0.45, 0.55, 0.65}, {0, 0, 1, 0, 0, 1}};
  std::vector<SliceScores> slices = {a, b};
  ASSERT_OK_AND_ASSIGN(auto r,
                       OptimizeGroupThresholds(slices, FairnessStrategy::kDemographicParity));
  EXPECT_LE(r.achieved_disparity, kDefaultParityEpsilon);
  EXPECT_GE(r.slices[0].threshold, r.slices[1].threshold);
}

TEST(GroupThresholdTest, NeedsTwoSlices) {
  std::vector<SliceScores> one = {SliceScores{"a", {0.2, 0.8}, {0, 1}}};
  EXPECT_EQ(OptimizeGroupThresholds(one, FairnessStrategy::kDemographicParity).status().code(),
            absl::StatusCode::kFailedPrecondition);
  EXPECT_TRUE(OptimizeGroupThresholds(one, FairnessStrategy::kSingleThreshold).ok());
  EXPECT_FALSE(OptimizeGroupThresholds({}, FairnessStrategy::kSingleThreshold).ok());
}

TEST(GroupThresholdTest, EqualOpportunityWithoutPositivesUsesZeroRate) {
  std::vector<SliceScores> slices = {SliceScores{"a", {0.2, 0.8}, {0, 1}},
                                     SliceScores{"b", {0.3, 0.6}, {0, 0}}};
  ASSERT_OK_AND_ASSIGN(auto r,
                       OptimizeGroupThresholds(slices, FairnessStrategy::kEqualOpportunity));
  EXPECT_EQ(r.slices[1].quantity, 0.0);
  EXPECT_EQ(r.achieved_disparity, 0.0);
}

}  // namespace
}  // namespace whatif
