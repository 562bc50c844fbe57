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

#include "whatif/remote_model.h"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "httplib.h"

namespace whatif {

using nlohmann::json;

absl::StatusOr<RemoteEndpoint> RemoteEndpoint::Parse(std::string_view url) {
  constexpr std::string_view kScheme = "http://";
  if (url.substr(0, kScheme.size()) != kScheme) {
    return absl::InvalidArgumentError(
        absl::StrCat("model URL must start with http://: '", std::string(url), "'"));
  }
  std::string_view rest = url.substr(kScheme.size());
  RemoteEndpoint endpoint;
  const size_t slash = rest.find('/');
  std::string_view authority = rest.substr(0, slash);
  if (slash != std::string_view::npos) endpoint.path = std::string(rest.substr(slash));
  const size_t colon = authority.rfind(':');
  if (colon != std::string_view::npos) {
    int port = 0;
    const std::string port_text(authority.substr(colon + 1));
    if (!absl::SimpleAtoi(port_text, &port) || port <= 0 || port > 65535) {
      return absl::InvalidArgumentError(
          absl::StrCat("bad port in model URL: '", std::string(url), "'"));
    }
    endpoint.port = port;
    authority = authority.substr(0, colon);
  }
  if (authority.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("missing host in model URL: '", std::string(url), "'"));
  }
  endpoint.host = std::string(authority);
  return endpoint;
}

std::string RemoteEndpoint::ToString() const {
  return absl::StrCat("http://", host, ":", port, path);
}

json EncodeInstances(std::span<const Feature> features,
                     std::span<const Row> rows) {
  json instances = json::array();
  for (const Row& row : rows) {
    json instance = json::object();
    for (size_t f = 0; f < features.size(); ++f) {
      const Value& v = row[f];
      if (const double* d = AsNumber(v)) {
        instance[features[f].name] = *d;
      } else if (const std::string* s = AsString(v)) {
        instance[features[f].name] = *s;
      } else {
        instance[features[f].name] = nullptr;
      }
    }
    instances.push_back(std::move(instance));
  }
  return json{{"instances", std::move(instances)}};
}

absl::StatusOr<std::vector<PredictionOutput>> DecodePredictions(
    const TaskKind& task, const json& body, size_t expected) {
  if (!body.is_object() || !body.contains("predictions") ||
      !body.at("predictions").is_array()) {
    return absl::DataLossError(
        "protocol error: response lacks a \"predictions\" array");
  }
  const json& predictions = body.at("predictions");
  if (predictions.size() != expected) {
    return absl::DataLossError(
        absl::StrCat("protocol error: expected ", expected,
                     " predictions, got ", predictions.size()));
  }
  std::vector<PredictionOutput> out;
  out.reserve(expected);
  for (size_t i = 0; i < predictions.size(); ++i) {
    const json& p = predictions[i];
    PredictionOutput output;
    output.task = task;
    if (p.is_number()) {
      output.scores = {p.get<double>()};
    } else if (p.is_array() &&
               std::all_of(p.begin(), p.end(),
                           [](const json& x) { return x.is_number(); })) {
      output.scores = p.get<std::vector<double>>();
      // Binary servers commonly answer [p_negative, p_positive].
      if (task.is_binary() && output.scores.size() == 2) {
        output.scores = {output.scores[1]};
      }
    } else {
      return absl::DataLossError(
          absl::StrCat("protocol error: prediction ", i, " is not a number or list"));
    }
    if (absl::Status s = ValidatePrediction(output); !s.ok()) {
      return absl::DataLossError(
          absl::StrCat("protocol error: prediction ", i, ": ", s.message()));
    }
    out.push_back(std::move(output));
  }
  return out;
}

absl::StatusOr<std::unique_ptr<RemoteModel>> RemoteModel::Create(
    std::string_view url, TaskKind task, RemoteOptions options) {
  absl::StatusOr<RemoteEndpoint> endpoint = RemoteEndpoint::Parse(url);
  if (!endpoint.ok()) return endpoint.status();
  if (options.max_in_flight == 0 || options.batch_size == 0) {
    return absl::InvalidArgumentError(
        "max_in_flight and batch_size must be positive");
  }
  return std::unique_ptr<RemoteModel>(
      new RemoteModel(*std::move(endpoint), task, options));
}

absl::StatusOr<std::vector<PredictionOutput>> RemoteModel::PostChunk(
    std::span<const Feature> features, std::span<const Row> rows) const {
  httplib::Client client(endpoint_.host, endpoint_.port);
  const auto seconds =
      std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(
      options_.timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());
  client.set_write_timeout(seconds.count(), micros.count());

  const std::string body = EncodeInstances(features, rows).dump();
  httplib::Result result =
      client.Post(endpoint_.path.c_str(), body, "application/json");
  if (!result) {
    return absl::UnavailableError(
        absl::StrCat("model endpoint ", endpoint_.ToString(),
                     " unreachable (http_status=0): ",
                     httplib::to_string(result.error())));
  }
  if (result->status < 200 || result->status >= 300) {
    return absl::UnavailableError(
        absl::StrCat("model endpoint ", endpoint_.ToString(),
                     " returned http_status=", result->status));
  }
  json parsed = json::parse(result->body, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded()) {
    return absl::DataLossError("protocol error: response is not valid JSON");
  }
  return DecodePredictions(task_, parsed, rows.size());
}

absl::StatusOr<std::vector<PredictionOutput>> RemoteModel::PredictBatch(
    std::span<const Feature> features, std::span<const Row> rows) const {
  std::vector<PredictionOutput> outputs(rows.size());
  if (rows.empty()) return outputs;
  const size_t chunks =
      (rows.size() + options_.batch_size - 1) / options_.batch_size;
  std::atomic<size_t> next_chunk{0};
  std::mutex error_mu;
  absl::Status first_error;

  auto worker = [&] {
    while (true) {
      const size_t c = next_chunk.fetch_add(1);
      if (c >= chunks) return;
      {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error.ok()) return;
      }
      const size_t begin = c * options_.batch_size;
      const size_t end = std::min(rows.size(), begin + options_.batch_size);
      absl::StatusOr<std::vector<PredictionOutput>> part =
          PostChunk(features, rows.subspan(begin, end - begin));
      if (!part.ok()) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (first_error.ok()) first_error = part.status();
        return;
      }
      std::move(part->begin(), part->end(),
                outputs.begin() + static_cast<std::ptrdiff_t>(begin));
    }
  };

  const size_t workers = std::min(options_.max_in_flight, chunks);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (size_t i = 0; i < workers; ++i) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
  }
  if (!first_error.ok()) return first_error;
  return outputs;
}

}  // namespace whatif
