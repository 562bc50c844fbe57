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

#include "whatif/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"

namespace whatif {
namespace {

double Ratio(size_t num, size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

absl::Status CheckBinaryInputs(std::span<const double> scores,
                               std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        scores.size(), " scores but ", labels.size(), " labels"));
  }
  for (size_t i = 0; i < scores.size(); ++i) {
    if (!(scores[i] >= 0.0 && scores[i] <= 1.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("score ", i, " = ", scores[i], " is outside [0, 1]"));
    }
    if (labels[i] != 0 && labels[i] != 1) {
      return absl::InvalidArgumentError(
          absl::StrCat("label ", i, " = ", labels[i], " is not 0 or 1"));
    }
  }
  return absl::OkStatus();
}

absl::Status CheckBothClasses(std::span<const int> labels) {
  const size_t positives =
      static_cast<size_t>(std::count(labels.begin(), labels.end(), 1));
  if (positives == 0) {
    return absl::InvalidArgumentError(
        "labels contain no positive examples (class 1 missing)");
  }
  if (positives == labels.size()) {
    return absl::InvalidArgumentError(
        "labels contain no negative examples (class 0 missing)");
  }
  return absl::OkStatus();
}

// Midpoint that is strictly above `lo`, falling back to `hi` when the two are
// adjacent doubles.
double Midpoint(double lo, double hi) {
  const double mid = lo + (hi - lo) / 2.0;
  return mid > lo ? mid : hi;
}

}  // namespace

double ConfusionMatrix::accuracy() const { return Ratio(tp + tn, total()); }
double ConfusionMatrix::false_positive_rate() const { return Ratio(fp, fp + tn); }
double ConfusionMatrix::false_negative_rate() const { return Ratio(fn, fn + tp); }
double ConfusionMatrix::true_positive_rate() const { return Ratio(tp, tp + fn); }
double ConfusionMatrix::positive_rate() const {
  return Ratio(tp + fp, total());
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  tp += other.tp;
  fp += other.fp;
  tn += other.tn;
  fn += other.fn;
  return *this;
}

absl::StatusOr<CostRatio> CostRatio::Create(double value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    return absl::InvalidArgumentError(
        absl::StrCat("cost ratio must be positive and finite, got ", value));
  }
  return CostRatio(value);
}

double CostRatio::Cost(const ConfusionMatrix& m) const {
  return value_ * static_cast<double>(m.fp) + static_cast<double>(m.fn);
}

absl::StatusOr<ConfusionMatrix> ConfusionAt(std::span<const double> scores,
                                            std::span<const int> labels,
                                            double threshold) {
  if (absl::Status s = CheckBinaryInputs(scores, labels); !s.ok()) return s;
  ConfusionMatrix m;
  for (size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    if (labels[i] == 1) {
      predicted ? ++m.tp : ++m.fn;
    } else {
      predicted ? ++m.fp : ++m.tn;
    }
  }
  return m;
}

std::vector<double> CandidateThresholds(std::span<const double> scores) {
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<double> out;
  out.reserve(sorted.size() + 1);
  out.push_back(0.0);
  for (size_t i = 0; i + 1 < sorted.size(); ++i) {
    out.push_back(Midpoint(sorted[i], sorted[i + 1]));
  }
  if (out.back() < 1.0) out.push_back(1.0);
  return out;
}

absl::StatusOr<std::vector<ThresholdCandidate>> SweepThresholds(
    std::span<const double> scores, std::span<const int> labels) {
  if (absl::Status s = CheckBinaryInputs(scores, labels); !s.ok()) return s;
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return scores[a] < scores[b]; });

  // Start with everything predicted positive and walk thresholds upward,
  // flipping each score group to negative once the threshold passes it.
  ConfusionMatrix m;
  for (int label : labels) label == 1 ? ++m.tp : ++m.fp;

  const std::vector<double> thresholds = CandidateThresholds(scores);
  std::vector<ThresholdCandidate> out;
  out.reserve(thresholds.size());
  size_t next = 0;
  for (double t : thresholds) {
    while (next < order.size() && scores[order[next]] < t) {
      if (labels[order[next]] == 1) {
        --m.tp;
        ++m.fn;
      } else {
        --m.fp;
        ++m.tn;
      }
      ++next;
    }
    out.push_back(ThresholdCandidate{t, m});
  }
  return out;
}

absl::StatusOr<RocCurve> ComputeRocCurve(std::span<const double> scores,
                                         std::span<const int> labels) {
  if (absl::Status s = CheckBinaryInputs(scores, labels); !s.ok()) return s;
  if (absl::Status s = CheckBothClasses(labels); !s.ok()) return s;
  absl::StatusOr<std::vector<ThresholdCandidate>> sweep =
      SweepThresholds(scores, labels);
  if (!sweep.ok()) return sweep.status();

  RocCurve roc;
  for (const ThresholdCandidate& c : *sweep) {
    roc.points.push_back(RocPoint{c.confusion.false_positive_rate(),
                                  c.confusion.true_positive_rate(), c.threshold});
  }
  // Scores of exactly 1 stay positive at threshold 1; close the curve.
  if (roc.points.back().fpr != 0.0 || roc.points.back().tpr != 0.0) {
    roc.points.push_back(RocPoint{0.0, 0.0, 1.0});
  }
  double area = 0.0;
  for (size_t i = 0; i + 1 < roc.points.size(); ++i) {
    const RocPoint& a = roc.points[i];
    const RocPoint& b = roc.points[i + 1];
    area += (a.fpr - b.fpr) * (a.tpr + b.tpr) / 2.0;
  }
  roc.auc = std::clamp(area, 0.0, 1.0);
  return roc;
}

const ThresholdCandidate& CheapestCandidate(
    std::span<const ThresholdCandidate> sweep, CostRatio cost_ratio) {
  size_t best = 0;
  double best_cost = cost_ratio.Cost(sweep[0].confusion);
  for (size_t i = 1; i < sweep.size(); ++i) {
    const double cost = cost_ratio.Cost(sweep[i].confusion);
    if (cost < best_cost) {
      best = i;
      best_cost = cost;
    }
  }
  return sweep[best];
}

absl::StatusOr<double> OptimizeSingleThreshold(std::span<const double> scores,
                                               std::span<const int> labels,
                                               CostRatio cost_ratio) {
  if (absl::Status s = CheckBinaryInputs(scores, labels); !s.ok()) return s;
  if (absl::Status s = CheckBothClasses(labels); !s.ok()) return s;
  absl::StatusOr<std::vector<ThresholdCandidate>> sweep =
      SweepThresholds(scores, labels);
  if (!sweep.ok()) return sweep.status();
  return CheapestCandidate(*sweep, cost_ratio).threshold;
}

absl::StatusOr<RegressionMetrics> ComputeRegressionMetrics(
    std::span<const double> predictions, std::span<const double> targets) {
  if (predictions.size() != targets.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        predictions.size(), " predictions but ", targets.size(), " targets"));
  }
  if (predictions.empty()) {
    return absl::InvalidArgumentError("regression metrics need at least one point");
  }
  RegressionMetrics m;
  for (size_t i = 0; i < predictions.size(); ++i) {
    const double e = predictions[i] - targets[i];
    m.mean_error += e;
    m.mean_absolute_error += std::abs(e);
    m.mean_squared_error += e * e;
  }
  const double n = static_cast<double>(predictions.size());
  m.mean_error /= n;
  m.mean_absolute_error /= n;
  m.mean_squared_error /= n;
  return m;
}

size_t MulticlassConfusion::total() const {
  return std::accumulate(counts.begin(), counts.end(), size_t{0});
}

double MulticlassConfusion::accuracy() const {
  size_t correct = 0;
  for (int c = 0; c < num_classes; ++c) correct += at(c, c);
  return Ratio(correct, total());
}

absl::StatusOr<MulticlassConfusion> ComputeMulticlassConfusion(
    std::span<const int> predicted, std::span<const int> actual,
    int num_classes) {
  if (predicted.size() != actual.size()) {
    return absl::InvalidArgumentError("predicted and actual differ in length");
  }
  MulticlassConfusion m;
  m.num_classes = num_classes;
  m.counts.assign(static_cast<size_t>(num_classes * num_classes), 0);
  for (size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] < 0 || predicted[i] >= num_classes || actual[i] < 0 ||
        actual[i] >= num_classes) {
      return absl::InvalidArgumentError(
          absl::StrCat("class index out of range at ", i));
    }
    ++m.counts[static_cast<size_t>(actual[i] * num_classes + predicted[i])];
  }
  return m;
}

}  // namespace whatif
