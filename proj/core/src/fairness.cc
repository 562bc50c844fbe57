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

#include "whatif/fairness.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"

namespace whatif {
namespace {

struct Choice {
  double quantity = 0.0;
  double cost = 0.0;
  size_t candidate = 0;
};

// A slice's candidates reduced to the best one per distinct quantity,
// sorted by quantity, so the nearest candidate to a target is a binary search.
struct QuantityIndex {
  std::vector<ThresholdCandidate> sweep;
  std::vector<Choice> choices;

  Choice Nearest(double target) const {
    auto it = std::lower_bound(
        choices.begin(), choices.end(), target,
        [](const Choice& c, double t) { return c.quantity < t; });
    if (it == choices.begin()) return *it;
    if (it == choices.end()) return choices.back();
    const Choice& above = *it;
    const Choice& below = *(it - 1);
    const double da = above.quantity - target;
    const double db = target - below.quantity;
    if (da != db) return da < db ? above : below;
    return Better(above, below) ? above : below;
  }

  static bool Better(const Choice& a, const Choice& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    return a.candidate < b.candidate;
  }
};

absl::StatusOr<QuantityIndex> BuildIndex(const SliceScores& slice,
                                         FairnessStrategy strategy,
                                         CostRatio cost_ratio) {
  absl::StatusOr<std::vector<ThresholdCandidate>> sweep =
      SweepThresholds(slice.scores, slice.labels);
  if (!sweep.ok()) {
    return absl::Status(sweep.status().code(),
                        absl::StrCat("slice ", slice.key, ": ",
                                     sweep.status().message()));
  }
  QuantityIndex index;
  index.sweep = *std::move(sweep);
  std::vector<Choice> all;
  all.reserve(index.sweep.size());
  for (size_t i = 0; i < index.sweep.size(); ++i) {
    const ConfusionMatrix& m = index.sweep[i].confusion;
    all.push_back(Choice{ParityQuantity(strategy, m), cost_ratio.Cost(m), i});
  }
  std::sort(all.begin(), all.end(), [](const Choice& a, const Choice& b) {
    if (a.quantity != b.quantity) return a.quantity < b.quantity;
    return QuantityIndex::Better(a, b);
  });
  for (const Choice& c : all) {
    if (index.choices.empty() || index.choices.back().quantity != c.quantity) {
      index.choices.push_back(c);
    }
  }
  return index;
}

SliceThreshold MakeSliceThreshold(const std::string& key,
                                  const ThresholdCandidate& c,
                                  FairnessStrategy strategy) {
  return SliceThreshold{key, c.threshold, c.confusion,
                        ParityQuantity(strategy, c.confusion)};
}

void Summarize(GroupThresholdResult& result, CostRatio cost_ratio) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  result.total_cost = 0.0;
  for (const SliceThreshold& s : result.slices) {
    lo = std::min(lo, s.quantity);
    hi = std::max(hi, s.quantity);
    result.total_cost += cost_ratio.Cost(s.confusion);
  }
  result.achieved_disparity = result.slices.empty() ? 0.0 : hi - lo;
}

absl::StatusOr<GroupThresholdResult> SingleThreshold(
    std::span<const SliceScores> slices, CostRatio cost_ratio) {
  std::vector<double> scores;
  std::vector<int> labels;
  for (const SliceScores& s : slices) {
    scores.insert(scores.end(), s.scores.begin(), s.scores.end());
    labels.insert(labels.end(), s.labels.begin(), s.labels.end());
  }
  absl::StatusOr<double> t = OptimizeSingleThreshold(scores, labels, cost_ratio);
  if (!t.ok()) return t.status();
  GroupThresholdResult result;
  result.strategy = FairnessStrategy::kSingleThreshold;
  result.global_threshold = *t;
  for (const SliceScores& s : slices) {
    absl::StatusOr<ConfusionMatrix> m = ConfusionAt(s.scores, s.labels, *t);
    if (!m.ok()) return m.status();
    result.slices.push_back(
        SliceThreshold{s.key, *t, *m,
                       ParityQuantity(FairnessStrategy::kSingleThreshold, *m)});
  }
  return result;
}

}  // namespace

std::string_view StrategyName(FairnessStrategy strategy) {
  switch (strategy) {
    case FairnessStrategy::kSingleThreshold:
      return "single";
    case FairnessStrategy::kGroupThresholds:
      return "group";
    case FairnessStrategy::kDemographicParity:
      return "demographic-parity";
    case FairnessStrategy::kEqualOpportunity:
      return "equal-opportunity";
    case FairnessStrategy::kEqualAccuracy:
      return "equal-accuracy";
  }
  return "single";
}

absl::StatusOr<FairnessStrategy> ParseStrategy(std::string_view text) {
  std::string t = absl::AsciiStrToLower(std::string(text));
  std::replace(t.begin(), t.end(), '_', '-');
  for (FairnessStrategy s :
       {FairnessStrategy::kSingleThreshold, FairnessStrategy::kGroupThresholds,
        FairnessStrategy::kDemographicParity,
        FairnessStrategy::kEqualOpportunity, FairnessStrategy::kEqualAccuracy}) {
    if (t == StrategyName(s)) return s;
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown strategy '", std::string(text),
      "'; expected single, group, demographic-parity, equal-opportunity or "
      "equal-accuracy"));
}

double ParityQuantity(FairnessStrategy strategy, const ConfusionMatrix& m) {
  switch (strategy) {
    case FairnessStrategy::kEqualOpportunity:
      return m.true_positive_rate();
    case FairnessStrategy::kEqualAccuracy:
      return m.accuracy();
    default:
      return m.positive_rate();
  }
}

absl::StatusOr<GroupThresholdResult> OptimizeGroupThresholds(
    std::span<const SliceScores> slices, FairnessStrategy strategy,
    CostRatio cost_ratio) {
  if (slices.empty()) return absl::InvalidArgumentError("no slices");
  if (strategy == FairnessStrategy::kSingleThreshold) {
    absl::StatusOr<GroupThresholdResult> result =
        SingleThreshold(slices, cost_ratio);
    if (result.ok()) Summarize(*result, cost_ratio);
    return result;
  }
  if (slices.size() < 2) {
    return absl::FailedPreconditionError(absl::StrCat(
        "strategy ", std::string(StrategyName(strategy)),
        " needs at least two slices, got ", slices.size()));
  }

  std::vector<QuantityIndex> indexes;
  indexes.reserve(slices.size());
  for (const SliceScores& s : slices) {
    absl::StatusOr<QuantityIndex> index = BuildIndex(s, strategy, cost_ratio);
    if (!index.ok()) return index.status();
    indexes.push_back(*std::move(index));
  }

  GroupThresholdResult result;
  result.strategy = strategy;
  if (strategy == FairnessStrategy::kGroupThresholds) {
    for (size_t i = 0; i < slices.size(); ++i) {
      result.slices.push_back(MakeSliceThreshold(
          slices[i].key, CheapestCandidate(indexes[i].sweep, cost_ratio),
          strategy));
    }
    Summarize(result, cost_ratio);
    return result;
  }

  std::vector<Choice> picks(slices.size());
  std::vector<Choice> best_picks;
  double best_disparity = std::numeric_limits<double>::infinity();
  double best_cost = std::numeric_limits<double>::infinity();
  double best_target = 0.0;
  for (int step = 0; step <= kTargetScanSteps; ++step) {
    const double target = static_cast<double>(step) / kTargetScanSteps;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double cost = 0.0;
    for (size_t i = 0; i < indexes.size(); ++i) {
      picks[i] = indexes[i].Nearest(target);
      lo = std::min(lo, picks[i].quantity);
      hi = std::max(hi, picks[i].quantity);
      cost += picks[i].cost;
    }
    const double disparity = hi - lo;
    if (disparity < best_disparity ||
        (disparity == best_disparity && cost < best_cost)) {
      best_disparity = disparity;
      best_cost = cost;
      best_picks = picks;
      best_target = target;
    }
  }
  for (size_t i = 0; i < slices.size(); ++i) {
    result.slices.push_back(MakeSliceThreshold(
        slices[i].key, indexes[i].sweep[best_picks[i].candidate], strategy));
  }
  result.target = best_target;
  Summarize(result, cost_ratio);
  return result;
}

}  // namespace whatif
