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

#include "whatif/builtin_model.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"

namespace whatif {
namespace {

using nlohmann::json;

absl::Status CheckFinite(double v, const std::string& where) {
  if (!std::isfinite(v)) {
    return absl::InvalidArgumentError(
        absl::StrCat("non-finite weight in ", where));
  }
  return absl::OkStatus();
}

std::string_view ActivationName(Activation a) {
  return a == Activation::kRelu ? "relu" : "identity";
}

std::string_view OutputName(OutputTransform o) {
  switch (o) {
    case OutputTransform::kSigmoid:
      return "sigmoid";
    case OutputTransform::kSoftmax:
      return "softmax";
    case OutputTransform::kIdentity:
      return "identity";
  }
  return "identity";
}

// Where each encoded input slot reads from.
struct InputSlot {
  size_t feature;  // index into the caller's feature layout
  bool numeric;
  Standardization standardization;
  const std::vector<std::string>* vocab = nullptr;
};

}  // namespace

size_t BuiltinModelSpec::EncodedWidth() const {
  size_t width = 0;
  for (const std::string& name : feature_order) {
    if (auto it = categorical_vocab.find(name); it != categorical_vocab.end()) {
      width += it->second.size();
    } else {
      width += 1;
    }
  }
  return width;
}

absl::Status ValidateBuiltinModelSpec(const BuiltinModelSpec& spec) {
  if (spec.feature_order.empty()) {
    return absl::InvalidArgumentError("feature_order is empty");
  }
  for (const std::string& name : spec.feature_order) {
    const bool numeric = spec.numeric_standardization.count(name) > 0;
    const bool categorical = spec.categorical_vocab.count(name) > 0;
    if (numeric == categorical) {
      return absl::InvalidArgumentError(absl::StrCat(
          "feature '", name,
          "' must appear in exactly one of numeric_standardization and "
          "categorical_vocab"));
    }
    if (numeric) {
      const Standardization& s = spec.numeric_standardization.at(name);
      if (absl::Status st = CheckFinite(s.mean, absl::StrCat("mean of '", name, "'"));
          !st.ok()) {
        return st;
      }
      if (!std::isfinite(s.std) || s.std <= 0.0) {
        return absl::InvalidArgumentError(absl::StrCat(
            "standardization std of '", name, "' must be finite and positive"));
      }
    }
  }
  if (spec.layers.empty()) {
    return absl::InvalidArgumentError("model has no layers");
  }
  size_t width = spec.EncodedWidth();
  for (size_t l = 0; l < spec.layers.size(); ++l) {
    const DenseLayer& layer = spec.layers[l];
    const size_t out = layer.weights.size();
    if (out == 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("layer ", l, " has no output units"));
    }
    for (size_t r = 0; r < out; ++r) {
      if (layer.weights[r].size() != width) {
        return absl::InvalidArgumentError(absl::StrCat(
            "dimension mismatch: layer ", l, " weight row ", r, " has ",
            layer.weights[r].size(), " columns, expected input width ", width));
      }
      for (double w : layer.weights[r]) {
        if (absl::Status st = CheckFinite(w, absl::StrCat("layer ", l, " weights"));
            !st.ok()) {
          return st;
        }
      }
    }
    if (layer.bias.size() != out) {
      return absl::InvalidArgumentError(absl::StrCat(
          "dimension mismatch: layer ", l, " has ", out,
          " output units but bias of length ", layer.bias.size()));
    }
    for (double b : layer.bias) {
      if (absl::Status st = CheckFinite(b, absl::StrCat("layer ", l, " bias"));
          !st.ok()) {
        return st;
      }
    }
    width = out;
  }
  if (static_cast<int>(width) != spec.task.OutputWidth()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "dimension mismatch: final layer width ", width, " but task ",
        TaskKindToString(spec.task), " needs ", spec.task.OutputWidth()));
  }
  const OutputTransform expected =
      spec.task.is_binary()       ? OutputTransform::kSigmoid
      : spec.task.is_multiclass() ? OutputTransform::kSoftmax
                                  : OutputTransform::kIdentity;
  if (spec.output != expected) {
    return absl::InvalidArgumentError(
        absl::StrCat("task ", TaskKindToString(spec.task), " needs output '",
                     std::string(OutputName(expected)), "', got '",
                     std::string(OutputName(spec.output)), "'"));
  }
  return absl::OkStatus();
}

absl::StatusOr<BuiltinModelSpec> ParseBuiltinModelSpec(const json& doc) {
  BuiltinModelSpec spec;
  try {
    if (!doc.is_object()) {
      return absl::InvalidArgumentError("model document must be a JSON object");
    }
    for (const char* field : {"task", "feature_order", "layers", "output"}) {
      if (!doc.contains(field)) {
        return absl::InvalidArgumentError(
            absl::StrCat("model document is missing '", field, "'"));
      }
    }
    absl::StatusOr<TaskKind> task =
        ParseTaskKind(doc.at("task").get<std::string>());
    if (!task.ok()) return task.status();
    spec.task = *task;
    spec.feature_order = doc.at("feature_order").get<std::vector<std::string>>();
    if (doc.contains("numeric_standardization")) {
      for (const auto& [name, s] : doc.at("numeric_standardization").items()) {
        spec.numeric_standardization[name] =
            Standardization{s.at("mean").get<double>(), s.at("std").get<double>()};
      }
    }
    if (doc.contains("categorical_vocab")) {
      for (const auto& [name, vocab] : doc.at("categorical_vocab").items()) {
        spec.categorical_vocab[name] = vocab.get<std::vector<std::string>>();
      }
    }
    for (const json& layer_doc : doc.at("layers")) {
      DenseLayer layer;
      layer.weights =
          layer_doc.at("weights").get<std::vector<std::vector<double>>>();
      layer.bias = layer_doc.at("bias").get<std::vector<double>>();
      const std::string activation =
          layer_doc.value("activation", std::string("identity"));
      if (activation == "relu") {
        layer.activation = Activation::kRelu;
      } else if (activation == "identity") {
        layer.activation = Activation::kIdentity;
      } else {
        return absl::InvalidArgumentError(
            absl::StrCat("unknown activation '", activation, "'"));
      }
      spec.layers.push_back(std::move(layer));
    }
    const std::string output = doc.at("output").get<std::string>();
    if (output == "sigmoid") {
      spec.output = OutputTransform::kSigmoid;
    } else if (output == "softmax") {
      spec.output = OutputTransform::kSoftmax;
    } else if (output == "identity") {
      spec.output = OutputTransform::kIdentity;
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown output transform '", output, "'"));
    }
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed model document: ", e.what()));
  }
  if (absl::Status s = ValidateBuiltinModelSpec(spec); !s.ok()) return s;
  return spec;
}

absl::StatusOr<BuiltinModelSpec> ParseBuiltinModelSpecText(std::string_view text) {
  json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) {
    return absl::InvalidArgumentError("model document is not valid JSON");
  }
  return ParseBuiltinModelSpec(doc);
}

json BuiltinModelSpecToJson(const BuiltinModelSpec& spec) {
  json doc;
  doc["task"] = TaskKindToString(spec.task);
  doc["feature_order"] = spec.feature_order;
  json standardization = json::object();
  for (const auto& [name, s] : spec.numeric_standardization) {
    standardization[name] = {{"mean", s.mean}, {"std", s.std}};
  }
  doc["numeric_standardization"] = standardization;
  json vocab = json::object();
  for (const auto& [name, values] : spec.categorical_vocab) vocab[name] = values;
  doc["categorical_vocab"] = vocab;
  json layers = json::array();
  for (const DenseLayer& layer : spec.layers) {
    layers.push_back({{"weights", layer.weights},
                      {"bias", layer.bias},
                      {"activation", std::string(ActivationName(layer.activation))}});
  }
  doc["layers"] = layers;
  doc["output"] = std::string(OutputName(spec.output));
  return doc;
}

absl::StatusOr<std::unique_ptr<BuiltinModel>> BuiltinModel::Create(
    BuiltinModelSpec spec) {
  if (absl::Status s = ValidateBuiltinModelSpec(spec); !s.ok()) return s;
  return std::unique_ptr<BuiltinModel>(new BuiltinModel(std::move(spec)));
}

absl::StatusOr<std::vector<PredictionOutput>> BuiltinModel::PredictBatch(
    std::span<const Feature> features, std::span<const Row> rows) const {
  std::vector<InputSlot> slots;
  slots.reserve(spec_.feature_order.size());
  for (const std::string& name : spec_.feature_order) {
    auto it = std::find_if(features.begin(), features.end(),
                           [&](const Feature& f) { return f.name == name; });
    if (it == features.end()) {
      return absl::InvalidArgumentError(
          absl::StrCat("model input '", name, "' is not a dataset feature"));
    }
    InputSlot slot;
    slot.feature = static_cast<size_t>(it - features.begin());
    if (auto n = spec_.numeric_standardization.find(name);
        n != spec_.numeric_standardization.end()) {
      slot.numeric = true;
      slot.standardization = n->second;
    } else {
      slot.numeric = false;
      slot.vocab = &spec_.categorical_vocab.at(name);
    }
    slots.push_back(slot);
  }

  const size_t input_width = spec_.EncodedWidth();
  std::vector<PredictionOutput> outputs;
  outputs.reserve(rows.size());
  std::vector<double> activations;
  std::vector<double> next;
  for (size_t r = 0; r < rows.size(); ++r) {
    const Row row = rows[r];
    if (row.size() != features.size()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "row ", r, " has ", row.size(), " values for ", features.size(),
          " features"));
    }
    activations.assign(input_width, 0.0);
    size_t offset = 0;
    for (const InputSlot& slot : slots) {
      const Value& v = row[slot.feature];
      if (slot.numeric) {
        if (const double* d = AsNumber(v)) {
          activations[offset] =
              (*d - slot.standardization.mean) / slot.standardization.std;
        } else if (!IsMissing(v)) {
          return absl::InvalidArgumentError(absl::StrCat(
              "row ", r, ": model expects a number for '",
              features[slot.feature].name, "'"));
        }
        offset += 1;
      } else {
        if (const std::string* s = AsString(v)) {
          auto hit = std::find(slot.vocab->begin(), slot.vocab->end(), *s);
          if (hit != slot.vocab->end()) {
            activations[offset + static_cast<size_t>(hit - slot.vocab->begin())] =
                1.0;
          }
        } else if (const double* d = AsNumber(v)) {
          const std::string text = FormatNumber(*d);
          auto hit = std::find(slot.vocab->begin(), slot.vocab->end(), text);
          if (hit != slot.vocab->end()) {
            activations[offset + static_cast<size_t>(hit - slot.vocab->begin())] =
                1.0;
          }
        }
        offset += slot.vocab->size();
      }
    }

    for (const DenseLayer& layer : spec_.layers) {
      next.assign(layer.weights.size(), 0.0);
      for (size_t o = 0; o < layer.weights.size(); ++o) {
        double sum = layer.bias[o];
        const std::vector<double>& w = layer.weights[o];
        for (size_t i = 0; i < w.size(); ++i) sum += w[i] * activations[i];
        if (layer.activation == Activation::kRelu) sum = std::max(0.0, sum);
        next[o] = sum;
      }
      activations.swap(next);
    }

    PredictionOutput out;
    out.task = spec_.task;
    switch (spec_.output) {
      case OutputTransform::kSigmoid:
        out.scores = {1.0 / (1.0 + std::exp(-activations[0]))};
        break;
      case OutputTransform::kSoftmax: {
        const double peak =
            *std::max_element(activations.begin(), activations.end());
        double total = 0.0;
        out.scores.resize(activations.size());
        for (size_t k = 0; k < activations.size(); ++k) {
          out.scores[k] = std::exp(activations[k] - peak);
          total += out.scores[k];
        }
        for (double& s : out.scores) s /= total;
        break;
      }
      case OutputTransform::kIdentity:
        out.scores = {activations[0]};
        break;
    }
    if (!std::isfinite(out.scores[0])) {
      return absl::InternalError(absl::StrCat("row ", r, ": non-finite score"));
    }
    outputs.push_back(std::move(out));
  }
  return outputs;
}

}  // namespace whatif
