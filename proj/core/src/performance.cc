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

#include "whatif/performance.h"

#include <algorithm>
#include <map>
#include <utility>

#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"

namespace whatif {
namespace {

absl::StatusOr<size_t> LabelFeature(const Dataset& dataset,
                                    const GroundTruthBinding& binding) {
  std::optional<size_t> f = dataset.FeatureIndex(binding.feature);
  if (!f) {
    return absl::NotFoundError(
        absl::StrCat("unknown ground-truth feature '", binding.feature, "'"));
  }
  return *f;
}

absl::Status MissingLabel(const Dataset& dataset, size_t i,
                          const GroundTruthBinding& binding) {
  return absl::InvalidArgumentError(
      absl::StrCat("point ", dataset.point(i).id, " has no value for "
                   "ground-truth feature '", binding.feature, "'"));
}

std::string SliceKeyPart(const std::string& feature, const std::string& label) {
  return absl::StrCat(feature, ":", label);
}

template <typename T>
std::vector<T> Gather(const std::vector<T>& all,
                      const std::vector<size_t>& indices) {
  std::vector<T> out;
  out.reserve(indices.size());
  for (size_t i : indices) out.push_back(all[i]);
  return out;
}

absl::Status ValidateThreshold(double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("threshold ", t, " is outside [0, 1]"));
  }
  return absl::OkStatus();
}

// Picks the assignment for a binary model and, for strategies, the fairness
// summary.
absl::Status AssignThresholds(const std::vector<Slice>& slices,
                              const std::vector<double>& scores,
                              const std::vector<int>& labels,
                              const PerformanceRequest& request,
                              ModelPerformance& out) {
  ThresholdAssignment& assignment = out.assignment;
  if (request.threshold || !request.slice_thresholds.empty()) {
    if (request.threshold) {
      if (absl::Status s = ValidateThreshold(*request.threshold); !s.ok()) {
        return s;
      }
      assignment.global_threshold = *request.threshold;
    }
    for (const auto& [key, t] : request.slice_thresholds) {
      if (absl::Status s = ValidateThreshold(t); !s.ok()) return s;
      const bool known =
          std::any_of(slices.begin(), slices.end(),
                      [&](const Slice& s) { return s.key == key; });
      if (!known) {
        out.warnings.push_back(
            absl::StrCat("threshold for unknown slice '", key, "' ignored"));
        continue;
      }
      assignment.per_slice[key] = t;
    }
    return absl::OkStatus();
  }
  if (!request.strategy && !request.cost_ratio) return absl::OkStatus();

  const FairnessStrategy strategy =
      request.strategy.value_or(FairnessStrategy::kSingleThreshold);
  std::vector<SliceScores> slice_scores;
  slice_scores.reserve(slices.size());
  for (const Slice& s : slices) {
    slice_scores.push_back(SliceScores{s.key, Gather(scores, s.indices),
                                       Gather(labels, s.indices)});
  }
  absl::StatusOr<GroupThresholdResult> result = OptimizeGroupThresholds(
      slice_scores, strategy, request.cost_ratio.value_or(CostRatio{}));
  if (!result.ok()) return result.status();

  assignment.strategy = strategy;
  if (result->global_threshold) {
    assignment.global_threshold = *result->global_threshold;
  } else {
    for (const SliceThreshold& s : result->slices) {
      assignment.per_slice[s.key] = s.threshold;
    }
  }
  FairnessSummary summary;
  summary.strategy = strategy;
  summary.epsilon = request.epsilon;
  summary.achieved_disparity = result->achieved_disparity;
  summary.parity_met = result->achieved_disparity <= request.epsilon;
  summary.target = result->target;
  out.fairness = summary;
  return absl::OkStatus();
}

absl::Status EvaluateBinary(const Dataset& dataset,
                            const std::vector<Slice>& slices,
                            const std::vector<PredictionOutput>& predictions,
                            const PerformanceRequest& request,
                            ModelPerformance& out) {
  absl::StatusOr<std::vector<int>> labels =
      BinaryLabels(dataset, request.binding);
  if (!labels.ok()) return labels.status();
  std::vector<double> scores;
  scores.reserve(predictions.size());
  for (const PredictionOutput& p : predictions) scores.push_back(p.primary());

  if (absl::Status s = AssignThresholds(slices, scores, *labels, request, out);
      !s.ok()) {
    return s;
  }

  ConfusionMatrix total;
  for (const Slice& slice : slices) {
    SliceMetrics m;
    m.key = slice.key;
    m.count = slice.indices.size();
    m.threshold = out.assignment.ThresholdFor(slice.key);
    absl::StatusOr<ConfusionMatrix> cm =
        ConfusionAt(Gather(scores, slice.indices),
                    Gather(*labels, slice.indices), *m.threshold);
    if (!cm.ok()) return cm.status();
    m.confusion = *cm;
    total += *cm;
    out.slices.push_back(std::move(m));
  }
  out.overall.key = std::string(kWholeDatasetSliceKey);
  out.overall.count = dataset.size();
  out.overall.confusion = total;
  if (out.assignment.per_slice.empty()) {
    out.overall.threshold = out.assignment.global_threshold;
  }

  absl::StatusOr<RocCurve> roc = ComputeRocCurve(scores, *labels);
  if (roc.ok()) {
    out.roc = *std::move(roc);
  } else {
    out.warnings.push_back(
        absl::StrCat("ROC curve omitted: ", roc.status().message()));
  }
  if (out.fairness && !out.fairness->parity_met &&
      out.fairness->strategy != FairnessStrategy::kSingleThreshold &&
      out.fairness->strategy != FairnessStrategy::kGroupThresholds) {
    out.warnings.push_back(absl::StrCat(
        "parity not met: disparity ", out.fairness->achieved_disparity,
        " exceeds epsilon ", out.fairness->epsilon));
  }
  return absl::OkStatus();
}

absl::Status EvaluateMulticlass(const Dataset& dataset,
                                const std::vector<Slice>& slices,
                                const std::vector<PredictionOutput>& predictions,
                                const PerformanceRequest& request,
                                ModelPerformance& out) {
  absl::StatusOr<std::vector<int>> labels =
      ClassLabels(dataset, request.binding);
  if (!labels.ok()) return labels.status();
  std::vector<int> predicted;
  predicted.reserve(predictions.size());
  for (const PredictionOutput& p : predictions) {
    predicted.push_back(p.ArgmaxClass());
  }
  const int k = out.task.num_classes;
  for (const Slice& slice : slices) {
    SliceMetrics m;
    m.key = slice.key;
    m.count = slice.indices.size();
    absl::StatusOr<MulticlassConfusion> cm = ComputeMulticlassConfusion(
        Gather(predicted, slice.indices), Gather(*labels, slice.indices), k);
    if (!cm.ok()) return cm.status();
    m.multiclass = *std::move(cm);
    out.slices.push_back(std::move(m));
  }
  out.overall.key = std::string(kWholeDatasetSliceKey);
  out.overall.count = dataset.size();
  absl::StatusOr<MulticlassConfusion> all =
      ComputeMulticlassConfusion(predicted, *labels, k);
  if (!all.ok()) return all.status();
  out.overall.multiclass = *std::move(all);
  return absl::OkStatus();
}

absl::Status EvaluateRegression(const Dataset& dataset,
                                const std::vector<Slice>& slices,
                                const std::vector<PredictionOutput>& predictions,
                                const PerformanceRequest& request,
                                ModelPerformance& out) {
  absl::StatusOr<std::vector<double>> targets =
      RegressionTargets(dataset, request.binding);
  if (!targets.ok()) return targets.status();
  std::vector<double> preds;
  preds.reserve(predictions.size());
  for (const PredictionOutput& p : predictions) preds.push_back(p.primary());
  for (const Slice& slice : slices) {
    SliceMetrics m;
    m.key = slice.key;
    m.count = slice.indices.size();
    absl::StatusOr<RegressionMetrics> r = ComputeRegressionMetrics(
        Gather(preds, slice.indices), Gather(*targets, slice.indices));
    if (!r.ok()) return r.status();
    m.regression = *r;
    out.slices.push_back(std::move(m));
  }
  out.overall.key = std::string(kWholeDatasetSliceKey);
  out.overall.count = dataset.size();
  absl::StatusOr<RegressionMetrics> all =
      ComputeRegressionMetrics(preds, *targets);
  if (!all.ok()) return all.status();
  out.overall.regression = *all;
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<std::vector<int>> BinaryLabels(
    const Dataset& dataset, const GroundTruthBinding& binding) {
  absl::StatusOr<size_t> f = LabelFeature(dataset, binding);
  if (!f.ok()) return f.status();
  if (!binding.positive_value) {
    return absl::InvalidArgumentError(
        "binary ground truth needs a positive class value");
  }
  const std::string& positive = *binding.positive_value;
  const std::optional<double> positive_number = ParseFiniteNumber(positive);
  std::vector<int> labels;
  labels.reserve(dataset.size());
  for (size_t i = 0; i < dataset.size(); ++i) {
    const Value& v = dataset.point(i).values[*f];
    if (const std::string* s = AsString(v)) {
      labels.push_back(*s == positive ? 1 : 0);
    } else if (const double* d = AsNumber(v)) {
      if (!positive_number) {
        return absl::InvalidArgumentError(absl::StrCat(
            "positive value '", positive, "' is not a number but '",
            binding.feature, "' is numeric"));
      }
      labels.push_back(*d == *positive_number ? 1 : 0);
    } else {
      return MissingLabel(dataset, i, binding);
    }
  }
  return labels;
}

absl::StatusOr<std::vector<int>> ClassLabels(const Dataset& dataset,
                                             const GroundTruthBinding& binding) {
  absl::StatusOr<size_t> f = LabelFeature(dataset, binding);
  if (!f.ok()) return f.status();
  std::vector<int> labels;
  labels.reserve(dataset.size());
  for (size_t i = 0; i < dataset.size(); ++i) {
    const Value& v = dataset.point(i).values[*f];
    if (IsMissing(v)) return MissingLabel(dataset, i, binding);
    if (binding.class_order.empty()) {
      // Without a class order, numeric labels are class indices.
      const double* d = AsNumber(v);
      if (d == nullptr || *d < 0 || *d != static_cast<double>(static_cast<int>(*d))) {
        return absl::InvalidArgumentError(absl::StrCat(
            "label '", ValueToString(v), "' of point ", dataset.point(i).id,
            " is not a class index; supply a class order"));
      }
      labels.push_back(static_cast<int>(*d));
      continue;
    }
    const std::string text = ValueToString(v);
    auto it = std::find(binding.class_order.begin(), binding.class_order.end(),
                        text);
    if (it == binding.class_order.end()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "label '", text, "' of point ", dataset.point(i).id,
          " is not in the class order"));
    }
    labels.push_back(static_cast<int>(it - binding.class_order.begin()));
  }
  return labels;
}

absl::StatusOr<std::vector<double>> RegressionTargets(
    const Dataset& dataset, const GroundTruthBinding& binding) {
  absl::StatusOr<size_t> f = LabelFeature(dataset, binding);
  if (!f.ok()) return f.status();
  std::vector<double> targets;
  targets.reserve(dataset.size());
  for (size_t i = 0; i < dataset.size(); ++i) {
    const Value& v = dataset.point(i).values[*f];
    const double* d = AsNumber(v);
    if (d == nullptr) {
      if (IsMissing(v)) return MissingLabel(dataset, i, binding);
      return absl::InvalidArgumentError(absl::StrCat(
          "regression target '", binding.feature, "' is not numeric"));
    }
    targets.push_back(*d);
  }
  return targets;
}

absl::StatusOr<std::vector<Slice>> PartitionSlices(
    const Dataset& dataset, const SliceSpec& spec,
    const ModelFields& model_fields) {
  if (spec.features.size() > 2) {
    return absl::InvalidArgumentError(absl::StrCat(
        "slicing takes at most two features, got ", spec.features.size()));
  }
  if (spec.features.empty()) {
    Slice all;
    all.key = std::string(kWholeDatasetSliceKey);
    all.indices.resize(dataset.size());
    for (size_t i = 0; i < dataset.size(); ++i) all.indices[i] = i;
    std::vector<Slice> out;
    if (!all.indices.empty()) out.push_back(std::move(all));
    return out;
  }
  BinningSpec binning;
  binning.x_feature = spec.features[0];
  if (spec.features.size() == 2) binning.y_feature = spec.features[1];
  binning.numeric_bin_count = spec.numeric_bin_count;
  absl::StatusOr<BinLayout> layout = AssignBins(dataset, binning, model_fields);
  if (!layout.ok()) return layout.status();

  std::map<std::pair<size_t, size_t>, std::vector<size_t>> groups;
  for (size_t i = 0; i < layout->points.size(); ++i) {
    groups[{layout->points[i].x_bin, layout->points[i].y_bin}].push_back(i);
  }
  std::vector<Slice> out;
  out.reserve(groups.size());
  for (auto& [bins, indices] : groups) {
    Slice slice;
    slice.key = SliceKeyPart(spec.features[0], layout->x.labels[bins.first]);
    if (spec.features.size() == 2) {
      absl::StrAppend(&slice.key, ", ",
                      SliceKeyPart(spec.features[1],
                                   layout->y.labels[bins.second]));
    }
    slice.indices = std::move(indices);
    out.push_back(std::move(slice));
  }
  return out;
}

double ThresholdAssignment::ThresholdFor(std::string_view slice_key) const {
  auto it = per_slice.find(slice_key);
  return it == per_slice.end() ? global_threshold : it->second;
}

double SliceMetrics::accuracy() const {
  if (confusion) return confusion->accuracy();
  if (multiclass) return multiclass->accuracy();
  return 0.0;
}

std::string_view SliceSortName(SliceSort sort) {
  switch (sort) {
    case SliceSort::kCount:
      return "count";
    case SliceSort::kAlphabetical:
      return "alpha";
    case SliceSort::kAccuracy:
      return "accuracy";
  }
  return "count";
}

absl::StatusOr<SliceSort> ParseSliceSort(std::string_view text) {
  const std::string t = absl::AsciiStrToLower(std::string(text));
  if (t == "count") return SliceSort::kCount;
  if (t == "alpha" || t == "alphabetical") return SliceSort::kAlphabetical;
  if (t == "accuracy") return SliceSort::kAccuracy;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown slice sort '", std::string(text),
      "'; expected count, alpha or accuracy"));
}

void SortSlices(std::vector<SliceMetrics>& slices, SliceSort sort) {
  switch (sort) {
    case SliceSort::kCount:
      std::stable_sort(slices.begin(), slices.end(),
                       [](const SliceMetrics& a, const SliceMetrics& b) {
                         return a.count > b.count;
                       });
      break;
    case SliceSort::kAlphabetical:
      std::stable_sort(slices.begin(), slices.end(),
                       [](const SliceMetrics& a, const SliceMetrics& b) {
                         return a.key < b.key;
                       });
      break;
    case SliceSort::kAccuracy:
      std::stable_sort(slices.begin(), slices.end(),
                       [](const SliceMetrics& a, const SliceMetrics& b) {
                         return a.accuracy() > b.accuracy();
                       });
      break;
  }
}

absl::StatusOr<PerformanceReport> ComputePerformance(
    const Dataset& dataset, std::span<const ModelHandle* const> models,
    const PerformanceRequest& request) {
  if (models.empty()) {
    return absl::FailedPreconditionError("no model registered");
  }
  if (dataset.empty()) {
    return absl::FailedPreconditionError("dataset is empty");
  }
  absl::StatusOr<std::vector<Slice>> slices =
      PartitionSlices(dataset, request.slicing);
  if (!slices.ok()) return slices.status();

  PerformanceReport report;
  report.slice_by = request.slicing.features;
  for (const ModelHandle* model : models) {
    ModelPerformance mp;
    mp.slot = model->slot();
    mp.display_name = model->display_name();
    mp.task = model->task();
    const bool wants_thresholds = request.strategy || request.cost_ratio ||
                                  request.threshold ||
                                  !request.slice_thresholds.empty();
    if (mp.task.type != TaskKind::Type::kBinary && request.strategy) {
      return absl::InvalidArgumentError(absl::StrCat(
          "threshold strategies need a binary classifier; ",
          std::string(SlotName(mp.slot)), " is ", TaskKindToString(mp.task)));
    }
    absl::StatusOr<std::vector<PredictionOutput>> predictions =
        model->PredictDataset(dataset);
    if (!predictions.ok()) return predictions.status();

    absl::Status status;
    switch (mp.task.type) {
      case TaskKind::Type::kBinary:
        status = EvaluateBinary(dataset, *slices, *predictions, request, mp);
        break;
      case TaskKind::Type::kMulticlass:
        status = EvaluateMulticlass(dataset, *slices, *predictions, request, mp);
        break;
      case TaskKind::Type::kRegression:
        status = EvaluateRegression(dataset, *slices, *predictions, request, mp);
        break;
    }
    if (!status.ok()) return status;
    if (wants_thresholds && mp.task.type != TaskKind::Type::kBinary) {
      mp.warnings.push_back("thresholds ignored for non-binary models");
    }
    SortSlices(mp.slices, request.sort);
    report.models.push_back(std::move(mp));
  }
  return report;
}

absl::StatusOr<ModelFields> ModelDerivedFields(
    const Dataset& dataset, const ModelHandle& model,
    std::span<const PredictionOutput> predictions,
    const GroundTruthBinding* binding, double threshold) {
  if (predictions.size() != dataset.size()) {
    return absl::InvalidArgumentError("predictions do not match the dataset");
  }
  const std::string prefix = std::string(SlotName(model.slot()));
  const TaskKind& task = model.task();
  ModelFields fields;
  std::vector<Value>& score = fields[absl::StrCat(prefix, ".score")];
  for (const PredictionOutput& p : predictions) score.emplace_back(p.primary());

  if (task.type == TaskKind::Type::kRegression) {
    if (binding != nullptr) {
      absl::StatusOr<std::vector<double>> targets =
          RegressionTargets(dataset, *binding);
      if (!targets.ok()) return targets.status();
      std::vector<Value>& error = fields[absl::StrCat(prefix, ".error")];
      for (size_t i = 0; i < predictions.size(); ++i) {
        error.emplace_back(predictions[i].primary() - (*targets)[i]);
      }
    }
    return fields;
  }

  std::vector<int> predicted;
  predicted.reserve(predictions.size());
  for (const PredictionOutput& p : predictions) {
    predicted.push_back(task.type == TaskKind::Type::kBinary
                            ? (p.primary() >= threshold ? 1 : 0)
                            : p.ArgmaxClass());
  }
  std::vector<Value>& predicted_field =
      fields[absl::StrCat(prefix, ".predicted")];
  for (int c : predicted) {
    if (task.type == TaskKind::Type::kMulticlass && binding != nullptr &&
        static_cast<size_t>(c) < binding->class_order.size()) {
      predicted_field.emplace_back(binding->class_order[static_cast<size_t>(c)]);
    } else {
      predicted_field.emplace_back(absl::StrCat(c));
    }
  }
  if (binding != nullptr) {
    absl::StatusOr<std::vector<int>> labels =
        task.type == TaskKind::Type::kBinary ? BinaryLabels(dataset, *binding)
                                             : ClassLabels(dataset, *binding);
    if (!labels.ok()) return labels.status();
    std::vector<Value>& correct = fields[absl::StrCat(prefix, ".correct")];
    for (size_t i = 0; i < predicted.size(); ++i) {
      correct.emplace_back(std::string(predicted[i] == (*labels)[i]
                                           ? "correct"
                                           : "incorrect"));
    }
  }
  return fields;
}

}  // namespace whatif
