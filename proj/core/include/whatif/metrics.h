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

#ifndef WHATIF_METRICS_H_
#define WHATIF_METRICS_H_

#include <cstddef>
#include <span>
#include <vector>

#include "absl/status/statusor.h"

namespace whatif {

// Binary confusion counts. Predicted positive iff score >= threshold.
struct ConfusionMatrix {
  size_t tp = 0;
  size_t fp = 0;
  size_t tn = 0;
  size_t fn = 0;

  size_t total() const { return tp + fp + tn + fn; }
  size_t positives() const { return tp + fn; }
  size_t negatives() const { return fp + tn; }
  size_t predicted_positive() const { return tp + fp; }

  // Each rate is 0 when its denominator is 0.
  double accuracy() const;
  // fp / (fp + tn)
  double false_positive_rate() const;
  // fn / (fn + tp)
  double false_negative_rate() const;
  // tp / (tp + fn)
  double true_positive_rate() const;
  // (tp + fp) / total
  double positive_rate() const;

  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  bool operator==(const ConfusionMatrix&) const = default;
};

// Ratio of the cost of a false positive to that of a false negative.
class CostRatio {
 public:
  CostRatio() = default;
  static absl::StatusOr<CostRatio> Create(double value);

  double value() const { return value_; }
  // value * FP + FN.
  double Cost(const ConfusionMatrix& m) const;

 private:
  explicit CostRatio(double value) : value_(value) {}
  double value_ = 1.0;
};

// Labels are 0 (negative) or 1 (positive). Scores must lie in [0, 1].
absl::StatusOr<ConfusionMatrix> ConfusionAt(std::span<const double> scores,
                                            std::span<const int> labels,
                                            double threshold);

// Candidate thresholds: 0, the midpoint of every pair of consecutive distinct
// scores, and 1, ascending. No other threshold in [0, 1] yields a confusion
// matrix that some candidate does not. Shared by ROC, threshold and fairness
// optimization.
std::vector<double> CandidateThresholds(std::span<const double> scores);

struct ThresholdCandidate {
  double threshold = 0.0;
  ConfusionMatrix confusion;
};

// Confusion matrix at every candidate threshold, ascending, in
// O(n log n).
absl::StatusOr<std::vector<ThresholdCandidate>> SweepThresholds(
    std::span<const double> scores, std::span<const int> labels);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;
};

// Ordered by ascending threshold: starts at (1, 1) for threshold 0 and ends
// at (0, 0) for threshold 1, so both rates are non-increasing along the
// curve.
struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

// Needs at least one positive and one negative label.
absl::StatusOr<RocCurve> ComputeRocCurve(std::span<const double> scores,
                                         std::span<const int> labels);

// Candidate threshold minimizing cost_ratio * FP + FN, smallest on ties. At
// ratio 1 this is the accuracy-maximizing threshold.
absl::StatusOr<double> OptimizeSingleThreshold(std::span<const double> scores,
                                               std::span<const int> labels,
                                               CostRatio cost_ratio = {});

// Same optimization over a precomputed sweep.
const ThresholdCandidate& CheapestCandidate(
    std::span<const ThresholdCandidate> sweep, CostRatio cost_ratio);

struct RegressionMetrics {
  // mean(pred - target), signed.
  double mean_error = 0.0;
  double mean_absolute_error = 0.0;
  double mean_squared_error = 0.0;
};

absl::StatusOr<RegressionMetrics> ComputeRegressionMetrics(
    std::span<const double> predictions, std::span<const double> targets);

// k x k counts indexed [actual][predicted].
struct MulticlassConfusion {
  int num_classes = 0;
  std::vector<size_t> counts;

  size_t at(int actual, int predicted) const {
    return counts[static_cast<size_t>(actual * num_classes + predicted)];
  }
  size_t total() const;
  double accuracy() const;
};

absl::StatusOr<MulticlassConfusion> ComputeMulticlassConfusion(
    std::span<const int> predicted, std::span<const int> actual,
    int num_classes);

}  // namespace whatif

#endif  // WHATIF_METRICS_H_
