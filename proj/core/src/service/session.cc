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

#include "whatif/service/session.h"

#include <random>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace whatif {
namespace {

std::string NewSessionId() {
  std::random_device rd;
  std::uniform_int_distribution<uint64_t> dist;
  return absl::StrFormat("%016x", dist(rd));
}

Json SettingsToJson(const SessionSettings& s) {
  Json gt = nullptr;
  if (s.ground_truth) {
    gt = Json{{"feature", s.ground_truth->feature},
              {"positive_value", s.ground_truth->positive_value
                                     ? Json(*s.ground_truth->positive_value)
                                     : Json(nullptr)},
              {"class_order", s.ground_truth->class_order}};
  }
  return Json{
      {"cost_ratio", s.cost_ratio ? Json(s.cost_ratio->value()) : Json(nullptr)},
      {"norm", std::string(NormName(s.norm))},
      {"numeric_bin_count", s.numeric_bin_count},
      {"epsilon", s.epsilon},
      {"threshold", s.threshold},
      {"ground_truth", std::move(gt)}};
}

absl::StatusOr<GroundTruthBinding> BindingFromJson(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("feature") || !j["feature"].is_string()) {
    return absl::InvalidArgumentError(
        "ground_truth needs a string 'feature'");
  }
  GroundTruthBinding b;
  b.feature = j["feature"].get<std::string>();
  if (j.contains("positive_value") && !j["positive_value"].is_null()) {
    const nlohmann::json& p = j["positive_value"];
    if (p.is_string()) {
      b.positive_value = p.get<std::string>();
    } else if (p.is_number()) {
      b.positive_value = FormatNumber(p.get<double>());
    } else {
      return absl::InvalidArgumentError("positive_value must be a string or number");
    }
  }
  if (j.contains("class_order")) {
    if (!j["class_order"].is_array()) {
      return absl::InvalidArgumentError("class_order must be an array");
    }
    for (const nlohmann::json& c : j["class_order"]) {
      if (!c.is_string()) {
        return absl::InvalidArgumentError("class_order entries must be strings");
      }
      b.class_order.push_back(c.get<std::string>());
    }
  }
  return b;
}

bool NamesModelField(const std::optional<std::string>& name) {
  return name && (name->starts_with("model1.") || name->starts_with("model2."));
}

}  // namespace

Session::Session() : id_(NewSessionId()) {}

uint64_t Session::version() const {
  absl::MutexLock lock(&mu_);
  return dataset_ ? dataset_->Snapshot().version : retired_version_;
}

absl::StatusOr<SessionResult> Session::LoadDataset(
    std::string_view bytes, DataFormat format, std::string name,
    const std::optional<std::vector<Feature>>& declared_schema) {
  absl::StatusOr<Dataset> dataset = Ingest(bytes, format, declared_schema);
  if (!dataset.ok()) return dataset.status();
  if (name.empty()) name = "dataset";

  absl::MutexLock lock(&mu_);
  const uint64_t version =
      dataset_ ? dataset_->Snapshot().version + 1 : retired_version_;
  dataset_ = std::make_shared<VersionedDataset>(*std::move(dataset), version);
  dataset_name_ = name;
  history_.clear();
  models_.ClearCaches();
  DatasetSnapshot snap = dataset_->Snapshot();
  Json body = {{"dataset", dataset_name_}};
  body.update(SchemaToJson(*snap.dataset));
  return SessionResult{std::move(body), snap.version};
}

absl::StatusOr<SessionResult> Session::LoadDatasetFile(const std::string& path) {
  absl::StatusOr<std::string> bytes = ReadFileToString(path);
  if (!bytes.ok()) return bytes.status();
  return LoadDataset(*bytes, FormatFromPath(path),
                     std::filesystem::path(path).stem().string());
}

absl::StatusOr<SessionResult> Session::RegisterHandle(
    ModelSlot slot, absl::StatusOr<std::shared_ptr<const Model>> model,
    std::string display_name, bool replace) {
  if (!model.ok()) return model.status();
  absl::MutexLock lock(&mu_);
  if (replace && models_.Get(slot) != nullptr) {
    // A replacement may change the task, so check against the other slot
    // only.
    if (absl::Status s = models_.Unregister(slot); !s.ok()) return s;
  }
  absl::StatusOr<std::shared_ptr<const ModelHandle>> handle =
      models_.Register(slot, *std::move(model), std::move(display_name));
  if (!handle.ok()) return handle.status();
  for (auto it = history_.begin(); it != history_.end();) {
    it = it->first.slot == slot ? history_.erase(it) : std::next(it);
  }
  Json body = ToJson(**handle);
  body["comparison_mode"] = models_.comparison_mode();
  const uint64_t version =
      dataset_ ? dataset_->Snapshot().version : retired_version_;
  return SessionResult{std::move(body), version};
}

absl::StatusOr<SessionResult> Session::RegisterModel(ModelSlot slot,
                                                     const ModelSource& source,
                                                     std::string display_name,
                                                     bool replace) {
  return RegisterHandle(slot, BuildModel(source), std::move(display_name),
                        replace);
}

absl::StatusOr<SessionResult> Session::RegisterModel(
    ModelSlot slot, std::shared_ptr<const Model> model,
    std::string display_name, bool replace) {
  if (model == nullptr) return absl::InvalidArgumentError("null model");
  return RegisterHandle(slot, std::move(model), std::move(display_name),
                        replace);
}

absl::StatusOr<std::shared_ptr<VersionedDataset>> Session::RequireDataset()
    const {
  absl::MutexLock lock(&mu_);
  if (!dataset_) return absl::FailedPreconditionError("no dataset loaded");
  return dataset_;
}

absl::Status Session::CheckDatasetName(std::string_view dataset_name) const {
  absl::MutexLock lock(&mu_);
  if (!dataset_) return absl::FailedPreconditionError("no dataset loaded");
  if (!dataset_name.empty() && dataset_name != dataset_name_) {
    return absl::NotFoundError(
        absl::StrCat("unknown dataset '", std::string(dataset_name), "'"));
  }
  return absl::OkStatus();
}

absl::StatusOr<DatasetSnapshot> Session::Snapshot() const {
  absl::StatusOr<std::shared_ptr<VersionedDataset>> vd = RequireDataset();
  if (!vd.ok()) return vd.status();
  return (*vd)->Snapshot();
}

std::vector<std::shared_ptr<const ModelHandle>> Session::Models() const {
  absl::MutexLock lock(&mu_);
  return models_.handles();
}

SessionSettings Session::settings() const {
  absl::MutexLock lock(&mu_);
  return settings_;
}

absl::StatusOr<std::vector<std::shared_ptr<const ModelHandle>>>
Session::SelectModels(std::optional<ModelSlot> model) const {
  absl::MutexLock lock(&mu_);
  if (model) {
    absl::StatusOr<std::shared_ptr<const ModelHandle>> h = models_.Require(*model);
    if (!h.ok()) return h.status();
    return std::vector<std::shared_ptr<const ModelHandle>>{*h};
  }
  std::vector<std::shared_ptr<const ModelHandle>> all = models_.handles();
  if (all.empty()) return absl::FailedPreconditionError("no model registered");
  return all;
}

void Session::InvalidateRow(const std::vector<Value>& row) const {
  for (const auto& handle : Models()) handle->Invalidate(row);
}

absl::StatusOr<SessionResult> Session::Info() const {
  absl::MutexLock lock(&mu_);
  Json dataset = nullptr;
  uint64_t version = retired_version_;
  if (dataset_) {
    DatasetSnapshot snap = dataset_->Snapshot();
    version = snap.version;
    dataset = Json{{"name", dataset_name_}};
    dataset.update(SchemaToJson(*snap.dataset));
  }
  Json models = Json::array();
  for (const auto& h : models_.handles()) models.push_back(ToJson(*h));
  Json body = {{"id", id_},
               {"version", version},
               {"dataset", std::move(dataset)},
               {"models", std::move(models)},
               {"comparison_mode", models_.comparison_mode()},
               {"settings", SettingsToJson(settings_)}};
  return SessionResult{std::move(body), version};
}

absl::StatusOr<SessionResult> Session::UpdateSettings(
    const nlohmann::json& patch) {
  if (!patch.is_object()) {
    return absl::InvalidArgumentError("settings must be a JSON object");
  }
  SessionSettings next = settings();
  for (const auto& [key, value] : patch.items()) {
    if (key == "cost_ratio") {
      if (value.is_null()) {
        next.cost_ratio.reset();
        continue;
      }
      if (!value.is_number()) {
        return absl::InvalidArgumentError("cost_ratio must be a number");
      }
      absl::StatusOr<CostRatio> r = CostRatio::Create(value.get<double>());
      if (!r.ok()) return r.status();
      next.cost_ratio = *r;
    } else if (key == "norm") {
      if (!value.is_string()) return absl::InvalidArgumentError("norm must be a string");
      absl::StatusOr<DistanceNorm> n = ParseNorm(value.get<std::string>());
      if (!n.ok()) return n.status();
      next.norm = *n;
    } else if (key == "numeric_bin_count") {
      if (!value.is_number_integer() || value.get<int64_t>() < 1) {
        return absl::InvalidArgumentError(
            "numeric_bin_count must be a positive integer");
      }
      next.numeric_bin_count = value.get<size_t>();
    } else if (key == "epsilon") {
      if (!value.is_number() || value.get<double>() < 0) {
        return absl::InvalidArgumentError("epsilon must be a non-negative number");
      }
      next.epsilon = value.get<double>();
    } else if (key == "threshold") {
      if (!value.is_number() || value.get<double>() < 0 ||
          value.get<double>() > 1) {
        return absl::InvalidArgumentError("threshold must be a number in [0, 1]");
      }
      next.threshold = value.get<double>();
    } else if (key == "ground_truth") {
      if (value.is_null()) {
        next.ground_truth.reset();
        continue;
      }
      absl::StatusOr<GroundTruthBinding> b = BindingFromJson(value);
      if (!b.ok()) return b.status();
      next.ground_truth = *std::move(b);
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown setting '", key, "'"));
    }
  }
  {
    absl::MutexLock lock(&mu_);
    settings_ = next;
  }
  return Info();
}

absl::StatusOr<SessionResult> Session::Stats(FeatureSortKey sort) const {
  absl::StatusOr<DatasetSnapshot> snap = Snapshot();
  if (!snap.ok()) return snap.status();
  return SessionResult{StatisticsToJson(*snap->dataset, sort), snap->version};
}

absl::StatusOr<SessionResult> Session::Points(size_t offset,
                                              size_t limit) const {
  absl::StatusOr<DatasetSnapshot> snap = Snapshot();
  if (!snap.ok()) return snap.status();
  return SessionResult{PointsPageToJson(*snap->dataset, offset, limit),
                       snap->version};
}

absl::StatusOr<SessionResult> Session::EditPoint(
    PointId id, const FeatureChanges& changes) {
  absl::StatusOr<std::shared_ptr<VersionedDataset>> vd = RequireDataset();
  if (!vd.ok()) return vd.status();
  std::vector<Value> before;
  auto edited = (*vd)->Mutate<DataPoint>(
      [&](Dataset& d) -> absl::StatusOr<DataPoint> {
        absl::StatusOr<const DataPoint*> p = d.Find(id);
        if (!p.ok()) return p.status();
        before = (*p)->values;
        return d.Edit(id, changes);
      });
  if (!edited.ok()) return edited.status();
  InvalidateRow(before);
  const auto& [snap, point] = *edited;
  return SessionResult{Json{{"point", ToJson(*snap.dataset, point)}},
                       snap.version};
}

absl::StatusOr<SessionResult> Session::DuplicatePoint(PointId id) {
  absl::StatusOr<std::shared_ptr<VersionedDataset>> vd = RequireDataset();
  if (!vd.ok()) return vd.status();
  auto copied = (*vd)->Duplicate(id);
  if (!copied.ok()) return copied.status();
  const auto& [snap, point] = *copied;
  return SessionResult{Json{{"point", ToJson(*snap.dataset, point)}},
                       snap.version};
}

absl::StatusOr<SessionResult> Session::DeletePoint(PointId id) {
  absl::StatusOr<std::shared_ptr<VersionedDataset>> vd = RequireDataset();
  if (!vd.ok()) return vd.status();
  absl::StatusOr<DatasetSnapshot> snap = (*vd)->Delete(id);
  if (!snap.ok()) return snap.status();
  {
    absl::MutexLock lock(&mu_);
    for (auto it = history_.begin(); it != history_.end();) {
      it = it->first.id == id ? history_.erase(it) : std::next(it);
    }
  }
  return SessionResult{Json{{"deleted", id}, {"num_points", snap->dataset->size()}},
                       snap->version};
}

absl::StatusOr<SessionResult> Session::Predict(const PredictQuery& query) {
  if (query.ids.empty() && query.points.empty()) {
    return absl::InvalidArgumentError("predict needs point ids or inline points");
  }
  absl::StatusOr<DatasetSnapshot> snap = Snapshot();
  if (!snap.ok()) return snap.status();
  absl::StatusOr<std::vector<std::shared_ptr<const ModelHandle>>> models =
      SelectModels(query.model);
  if (!models.ok()) return models.status();
  const Dataset& ds = *snap->dataset;

  std::vector<Row> rows;
  rows.reserve(query.ids.size());
  for (PointId id : query.ids) {
    absl::StatusOr<const DataPoint*> p = ds.Find(id);
    if (!p.ok()) return p.status();
    rows.push_back((*p)->row());
  }
  std::vector<std::vector<Value>> inline_values;
  for (const auto& point : query.points) {
    for (const auto& [name, v] : point) {
      if (!ds.FeatureIndex(name)) {
        return absl::InvalidArgumentError(
            absl::StrCat("inline point names unknown feature '", name, "'"));
      }
    }
    std::vector<Value> values(ds.num_features());
    for (size_t f = 0; f < ds.num_features(); ++f) {
      auto it = point.find(ds.features()[f].name);
      if (it != point.end()) values[f] = it->second;
    }
    inline_values.push_back(std::move(values));
  }
  for (const auto& values : inline_values) rows.push_back(values);

  std::vector<std::vector<PredictionOutput>> outputs;
  for (const auto& handle : *models) {
    absl::StatusOr<std::vector<PredictionOutput>> out =
        handle->PredictBatch(ds.features(), rows);
    if (!out.ok()) return out.status();
    outputs.push_back(*std::move(out));
  }

  Json entries = Json::array();
  absl::MutexLock lock(&mu_);
  for (size_t r = 0; r < rows.size(); ++r) {
    for (size_t m = 0; m < models->size(); ++m) {
      const PredictionOutput& out = outputs[m][r];
      Json e;
      if (r < query.ids.size()) {
        e["id"] = query.ids[r];
      } else {
        e["index"] = r - query.ids.size();
      }
      e["model"] = std::string(SlotName((*models)[m]->slot()));
      e["prediction"] = ToJson(out);
      if (r < query.ids.size()) {
        std::vector<PredictionOutput>& h =
            history_[HistoryKey{(*models)[m]->slot(), query.ids[r]}];
        if (h.empty() || h.back() != out) h.push_back(out);
        if (h.size() >= 2) {
          absl::StatusOr<ScoreDelta> delta =
              ComputeScoreDelta(h[h.size() - 2], h.back());
          if (delta.ok()) {
            e["previous"] = ToJson(h[h.size() - 2]);
            e["delta"] = ToJson(*delta);
          }
        }
      }
      entries.push_back(std::move(e));
    }
  }
  return SessionResult{Json{{"predictions", std::move(entries)}}, snap->version};
}

absl::StatusOr<SessionResult> Session::Bins(const BinsQuery& query) const {
  absl::StatusOr<DatasetSnapshot> snap = Snapshot();
  if (!snap.ok()) return snap.status();
  const Dataset& ds = *snap->dataset;
  const SessionSettings s = settings();
  ModelFields fields;
  if (NamesModelField(query.spec.x_feature) ||
      NamesModelField(query.spec.y_feature) ||
      NamesModelField(query.spec.color_feature)) {
    const std::optional<GroundTruthBinding>& binding =
        query.ground_truth ? query.ground_truth : s.ground_truth;
    for (const auto& handle : Models()) {
      absl::StatusOr<std::vector<PredictionOutput>> preds =
          handle->PredictDataset(ds);
      if (!preds.ok()) return preds.status();
      absl::StatusOr<ModelFields> f = ModelDerivedFields(
          ds, *handle, *preds, binding ? &*binding : nullptr, s.threshold);
      if (!f.ok()) return f.status();
      fields.merge(*f);
    }
  }
  absl::StatusOr<BinLayout> layout = AssignBins(ds, query.spec, fields);
  if (!layout.ok()) return layout.status();
  return SessionResult{ToJson(*layout), snap->version};
}

absl::StatusOr<SessionResult> Session::Counterfactual(
    const CounterfactualQuery& query) const {
  absl::StatusOr<DatasetSnapshot> snap = Snapshot();
  if (!snap.ok()) return snap.status();
  absl::StatusOr<std::vector<std::shared_ptr<const ModelHandle>>> models =
      SelectModels(query.model);
  if (!models.ok()) return models.status();
  const SessionSettings s = settings();
  OutcomePolicy policy;
  policy.threshold = query.threshold.value_or(s.threshold);
  policy.regression_margin = query.regression_margin;
  absl::StatusOr<CounterfactualResult> result = NearestCounterfactual(
      *snap->dataset, *models->front(), query.point, query.norm.value_or(s.norm),
      policy);
  if (!result.ok()) return result.status();
  return SessionResult{ToJson(*result), snap->version};
}

absl::StatusOr<SessionResult> Session::AttachDistance(
    PointId anchor, std::optional<DistanceNorm> norm) {
  absl::StatusOr<std::shared_ptr<VersionedDataset>> vd = RequireDataset();
  if (!vd.ok()) return vd.status();
  const DistanceNorm n = norm.value_or(settings().norm);
  auto attached = (*vd)->Mutate<std::string>(
      [&](Dataset& d) { return AttachDistanceFeature(d, anchor, n); });
  if (!attached.ok()) return attached.status();
  return SessionResult{Json{{"name", attached->second}},
                       attached->first.version};
}

absl::StatusOr<SessionResult> Session::Pdp(const PdpQuery& query,
                                           const PdpProgress& progress) const {
  absl::StatusOr<DatasetSnapshot> snap = Snapshot();
  if (!snap.ok()) return snap.status();
  absl::StatusOr<std::vector<std::shared_ptr<const ModelHandle>>> models =
      SelectModels(query.model);
  if (!models.ok()) return models.status();
  const double threshold = settings().threshold;
  std::vector<PdpModel> pdp_models;
  for (const auto& h : *models) pdp_models.push_back(PdpModel{h.get(), threshold});
  absl::StatusOr<PdpCurve> curve =
      query.point ? LocalPdp(*snap->dataset, pdp_models, *query.point, query.spec)
                  : GlobalPdp(*snap->dataset, pdp_models, query.spec, progress);
  if (!curve.ok()) return curve.status();
  return SessionResult{ToJson(*curve), snap->version};
}

absl::StatusOr<SessionResult> Session::Performance(
    PerformanceRequest request, std::optional<ModelSlot> model) const {
  absl::StatusOr<DatasetSnapshot> snap = Snapshot();
  if (!snap.ok()) return snap.status();
  absl::StatusOr<std::vector<std::shared_ptr<const ModelHandle>>> models =
      SelectModels(model);
  if (!models.ok()) return models.status();
  const SessionSettings s = settings();
  if (request.binding.feature.empty()) {
    if (!s.ground_truth) {
      return absl::InvalidArgumentError(
          "no ground-truth feature given and none configured in settings");
    }
    request.binding = *s.ground_truth;
  }
  if (!request.cost_ratio) request.cost_ratio = s.cost_ratio;
  std::vector<const ModelHandle*> raw;
  for (const auto& h : *models) raw.push_back(h.get());
  absl::StatusOr<PerformanceReport> report =
      ComputePerformance(*snap->dataset, raw, request);
  if (!report.ok()) return report.status();
  return SessionResult{ToJson(*report), snap->version};
}

}  // namespace whatif
