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

#include "whatif/service/http_server.h"

#include <atomic>
#include <filesystem>
#include <mutex>
#include <thread>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "httplib.h"
#include "whatif/service/params.h"

namespace whatif {
namespace {

constexpr char kJsonType[] = "application/json";
constexpr char kVersionHeader[] = "X-Snapshot-Version";

constexpr char kPlaceholderPage[] =
    "<!doctype html>\n<html><head><title>whatif</title></head><body>\n"
    "<p>Workbench assets are not installed. Start the server with "
    "<code>--ui-dir</code> pointing at a built workbench.</p>\n"
    "</body></html>\n";

Params QueryParams(const httplib::Request& req) {
  Params params;
  for (const auto& [key, value] : req.params) params[key] = value;
  return params;
}

void SendError(httplib::Response& res, const absl::Status& status) {
  res.status = HttpStatusFor(status);
  res.set_content(RenderJson(ErrorToJson(status)), kJsonType);
}

void SendResult(httplib::Response& res,
                const absl::StatusOr<SessionResult>& result,
                int success_status = 200) {
  if (!result.ok()) {
    SendError(res, result.status());
    return;
  }
  res.status = success_status;
  res.set_header(kVersionHeader, absl::StrCat(result->version));
  res.set_content(RenderJson(result->body), kJsonType);
}

absl::StatusOr<nlohmann::json> ParseBody(const httplib::Request& req) {
  if (req.body.empty()) return nlohmann::json::object();
  nlohmann::json j = nlohmann::json::parse(req.body, nullptr, false);
  if (j.is_discarded()) {
    return absl::InvalidArgumentError("request body is not valid JSON");
  }
  return j;
}

absl::StatusOr<PointId> PathId(const httplib::Request& req, size_t group) {
  PointId id = 0;
  if (!absl::SimpleAtoi(req.matches[group].str(), &id)) {
    return absl::InvalidArgumentError(
        absl::StrCat("'", req.matches[group].str(), "' is not a point id"));
  }
  return id;
}

// A request may pin the snapshot it expects with ?version=N; a superseded
// version is refused rather than answered from newer data.
absl::Status CheckVersion(const Session& session, const Params& params) {
  absl::StatusOr<std::optional<uint64_t>> v = GetUintParam(params, "version");
  if (!v.ok()) return v.status();
  if (*v && **v != session.version()) {
    return absl::AbortedError(absl::StrCat("snapshot version ", **v,
                                           " superseded by ", session.version()));
  }
  return absl::OkStatus();
}

absl::StatusOr<DataFormat> RequestFormat(const httplib::Request& req,
                                         const std::string& filename) {
  if (req.has_param("format")) {
    const std::string f = absl::AsciiStrToLower(req.get_param_value("format"));
    if (f == "csv") return DataFormat::kCsv;
    if (f == "jsonl" || f == "ndjson") return DataFormat::kJsonl;
    return absl::InvalidArgumentError(
        absl::StrCat("unknown format '", f, "'; expected csv or jsonl"));
  }
  if (!filename.empty()) return FormatFromPath(filename);
  const std::string type = req.get_header_value("Content-Type");
  if (type.find("ndjson") != std::string::npos ||
      type.find("jsonl") != std::string::npos) {
    return DataFormat::kJsonl;
  }
  return DataFormat::kCsv;
}

absl::StatusOr<ModelSource> ModelSourceFromJson(const nlohmann::json& body) {
  if (body.contains("spec")) {
    absl::StatusOr<BuiltinModelSpec> spec = ParseBuiltinModelSpec(body["spec"]);
    if (!spec.ok()) return spec.status();
    return ModelSource(*std::move(spec));
  }
  if (body.contains("url") && body["url"].is_string()) {
    RemoteSource remote;
    remote.url = body["url"].get<std::string>();
    remote.task = TaskKind::Binary();
    if (body.contains("task")) {
      if (!body["task"].is_string()) {
        return absl::InvalidArgumentError("task must be a string");
      }
      absl::StatusOr<TaskKind> task = ParseTaskKind(body["task"].get<std::string>());
      if (!task.ok()) return task.status();
      remote.task = *task;
    }
    if (body.contains("max_in_flight") && body["max_in_flight"].is_number_integer()) {
      remote.options.max_in_flight =
          std::max<size_t>(1, body["max_in_flight"].get<size_t>());
    }
    return ModelSource(std::move(remote));
  }
  return absl::InvalidArgumentError("model needs either 'spec' or 'url'");
}

absl::StatusOr<PredictQuery> PredictQueryFromJson(const nlohmann::json& body) {
  if (!body.is_object()) {
    return absl::InvalidArgumentError("request body must be a JSON object");
  }
  PredictQuery q;
  if (body.contains("model") && !body["model"].is_null()) {
    absl::StatusOr<std::string> name =
        body["model"].is_string() ? absl::StatusOr<std::string>(body["model"].get<std::string>())
                                  : absl::InvalidArgumentError("model must be a string");
    if (!name.ok()) return name.status();
    absl::StatusOr<ModelSlot> slot = ParseSlot(*name);
    if (!slot.ok()) return slot.status();
    q.model = *slot;
  }
  if (body.contains("ids")) {
    if (!body["ids"].is_array()) return absl::InvalidArgumentError("ids must be an array");
    for (const nlohmann::json& id : body["ids"]) {
      if (!id.is_number_unsigned()) {
        return absl::InvalidArgumentError("ids must be non-negative integers");
      }
      q.ids.push_back(id.get<PointId>());
    }
  }
  if (body.contains("points")) {
    if (!body["points"].is_array()) {
      return absl::InvalidArgumentError("points must be an array of objects");
    }
    for (const nlohmann::json& p : body["points"]) {
      if (!p.is_object()) return absl::InvalidArgumentError("points must be objects");
      std::map<std::string, Value, std::less<>> point;
      for (const auto& [key, value] : p.items()) {
        absl::StatusOr<Value> v = ValueFromJson(value);
        if (!v.ok()) {
          return absl::InvalidArgumentError(
              absl::StrCat("feature '", key, "': ", v.status().message()));
        }
        point[key] = *std::move(v);
      }
      q.points.push_back(std::move(point));
    }
  }
  return q;
}

absl::StatusOr<FeatureChanges> ChangesFromJson(const nlohmann::json& body) {
  const nlohmann::json& changes =
      body.contains("changes") ? body["changes"] : body;
  if (!changes.is_object() || changes.empty()) {
    return absl::InvalidArgumentError(
        "expected {\"changes\": {feature: value, ...}}");
  }
  FeatureChanges out;
  for (const auto& [key, value] : changes.items()) {
    absl::StatusOr<Value> v = ValueFromJson(value);
    if (!v.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("feature '", key, "': ", v.status().message()));
    }
    out.emplace_back(key, *std::move(v));
  }
  return out;
}

}  // namespace

int HttpStatusFor(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return 200;
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kOutOfRange:
      return 400;
    case absl::StatusCode::kNotFound:
      return 404;
    case absl::StatusCode::kAlreadyExists:
    case absl::StatusCode::kAborted:
    case absl::StatusCode::kFailedPrecondition:
      return 409;
    case absl::StatusCode::kUnimplemented:
      return 501;
    case absl::StatusCode::kUnavailable:
    case absl::StatusCode::kDataLoss:
      return 502;
    case absl::StatusCode::kDeadlineExceeded:
      return 504;
    default:
      return 500;
  }
}

struct HttpServer::Impl {
  std::shared_ptr<Session> session;
  ServerOptions options;
  httplib::Server server;
  std::mutex mu;
  bool bound = false;
  int port = 0;
  std::thread thread;

  void Routes();
  void DatasetRoutes();
  void AnalysisRoutes();
};

void HttpServer::Impl::DatasetRoutes() {
  Session& s = *session;

  server.Post("/datasets", [&s](const httplib::Request& req,
                                httplib::Response& res) {
    std::string bytes = req.body;
    std::string filename;
    std::string name = req.has_param("name") ? req.get_param_value("name") : "";
    if (req.is_multipart_form_data()) {
      if (!req.has_file("file")) {
        SendError(res, absl::InvalidArgumentError(
                           "multipart upload needs a 'file' part"));
        return;
      }
      const httplib::MultipartFormData file = req.get_file_value("file");
      bytes = file.content;
      filename = file.filename;
      if (req.has_file("name")) name = req.get_file_value("name").content;
      if (name.empty() && !filename.empty()) {
        name = std::filesystem::path(filename).stem().string();
      }
    }
    absl::StatusOr<DataFormat> format = RequestFormat(req, filename);
    if (!format.ok()) {
      SendError(res, format.status());
      return;
    }
    SendResult(res, s.LoadDataset(bytes, *format, name), 201);
  });

  server.Get(R"(/datasets/([^/]+)/stats)", [&s](const httplib::Request& req,
                                                httplib::Response& res) {
    if (absl::Status st = s.CheckDatasetName(req.matches[1].str()); !st.ok()) {
      SendError(res, st);
      return;
    }
    FeatureSortKey sort = FeatureSortKey::kNonUniformity;
    if (req.has_param("sort")) {
      absl::StatusOr<FeatureSortKey> k = ParseSortKey(req.get_param_value("sort"));
      if (!k.ok()) {
        SendError(res, k.status());
        return;
      }
      sort = *k;
    }
    SendResult(res, s.Stats(sort));
  });

  server.Get(R"(/datasets/([^/]+)/points)", [&s](const httplib::Request& req,
                                                 httplib::Response& res) {
    if (absl::Status st = s.CheckDatasetName(req.matches[1].str()); !st.ok()) {
      SendError(res, st);
      return;
    }
    const Params params = QueryParams(req);
    absl::StatusOr<std::optional<uint64_t>> offset = GetUintParam(params, "offset");
    absl::StatusOr<std::optional<uint64_t>> limit = GetUintParam(params, "limit");
    if (!offset.ok() || !limit.ok()) {
      SendError(res, !offset.ok() ? offset.status() : limit.status());
      return;
    }
    SendResult(res, s.Points(offset->value_or(0), limit->value_or(100)));
  });

  server.Patch(R"(/datasets/([^/]+)/points/(\d+))",
               [&s](const httplib::Request& req, httplib::Response& res) {
                 absl::Status st = s.CheckDatasetName(req.matches[1].str());
                 absl::StatusOr<PointId> id = PathId(req, 2);
                 absl::StatusOr<nlohmann::json> body = ParseBody(req);
                 if (st.ok() && !id.ok()) st = id.status();
                 if (st.ok() && !body.ok()) st = body.status();
                 if (!st.ok()) {
                   SendError(res, st);
                   return;
                 }
                 absl::StatusOr<FeatureChanges> changes = ChangesFromJson(*body);
                 if (!changes.ok()) {
                   SendError(res, changes.status());
                   return;
                 }
                 SendResult(res, s.EditPoint(*id, *changes));
               });

  server.Post(R"(/datasets/([^/]+)/points/(\d+)/duplicate)",
              [&s](const httplib::Request& req, httplib::Response& res) {
                absl::Status st = s.CheckDatasetName(req.matches[1].str());
                absl::StatusOr<PointId> id = PathId(req, 2);
                if (st.ok() && !id.ok()) st = id.status();
                if (!st.ok()) {
                  SendError(res, st);
                  return;
                }
                SendResult(res, s.DuplicatePoint(*id), 201);
              });

  server.Delete(R"(/datasets/([^/]+)/points/(\d+))",
                [&s](const httplib::Request& req, httplib::Response& res) {
                  absl::Status st = s.CheckDatasetName(req.matches[1].str());
                  absl::StatusOr<PointId> id = PathId(req, 2);
                  if (st.ok() && !id.ok()) st = id.status();
                  if (!st.ok()) {
                    SendError(res, st);
                    return;
                  }
                  SendResult(res, s.DeletePoint(*id));
                });
}

void HttpServer::Impl::AnalysisRoutes() {
  Session& s = *session;

  server.Get("/analysis/bins", [&s](const httplib::Request& req,
                                    httplib::Response& res) {
    const Params params = QueryParams(req);
    if (absl::Status st = CheckVersion(s, params); !st.ok()) {
      SendError(res, st);
      return;
    }
    absl::StatusOr<BinsQuery> q = ParseBinsQuery(params, s.settings());
    if (!q.ok()) {
      SendError(res, q.status());
      return;
    }
    SendResult(res, s.Bins(*q));
  });

  server.Get("/analysis/counterfactual", [&s](const httplib::Request& req,
                                              httplib::Response& res) {
    const Params params = QueryParams(req);
    if (absl::Status st = CheckVersion(s, params); !st.ok()) {
      SendError(res, st);
      return;
    }
    absl::StatusOr<CounterfactualQuery> q = ParseCounterfactualQuery(params);
    if (!q.ok()) {
      SendError(res, q.status());
      return;
    }
    SendResult(res, s.Counterfactual(*q));
  });

  server.Post("/analysis/distance-feature", [&s](const httplib::Request& req,
                                                 httplib::Response& res) {
    absl::StatusOr<nlohmann::json> body = ParseBody(req);
    absl::StatusOr<Params> params =
        body.ok() ? ParamsFromJson(*body) : absl::StatusOr<Params>(body.status());
    if (!params.ok()) {
      SendError(res, params.status());
      return;
    }
    absl::StatusOr<std::optional<uint64_t>> anchor = GetUintParam(*params, "point");
    if (anchor.ok() && !*anchor) anchor = GetUintParam(*params, "anchor");
    if (!anchor.ok() || !*anchor) {
      SendError(res, anchor.ok() ? absl::InvalidArgumentError(
                                       "parameter 'point': required")
                                 : anchor.status());
      return;
    }
    std::optional<DistanceNorm> norm;
    if (std::optional<std::string> n = GetParam(*params, "norm")) {
      absl::StatusOr<DistanceNorm> parsed = ParseNorm(*n);
      if (!parsed.ok()) {
        SendError(res, parsed.status());
        return;
      }
      norm = *parsed;
    }
    SendResult(res, s.AttachDistance(**anchor, norm), 201);
  });

  server.Get("/analysis/pdp", [this, &s](const httplib::Request& req,
                                         httplib::Response& res) {
    const Params params = QueryParams(req);
    if (absl::Status st = CheckVersion(s, params); !st.ok()) {
      SendError(res, st);
      return;
    }
    absl::StatusOr<PdpQuery> q = ParsePdpQuery(params);
    absl::StatusOr<bool> stream = GetFlagParam(params, "stream");
    if (!q.ok() || !stream.ok()) {
      SendError(res, !q.ok() ? q.status() : stream.status());
      return;
    }
    if (!*stream || q->point) {
      SendResult(res, s.Pdp(*q));
      return;
    }
    // Newline-delimited progress records, then the curve.
    std::shared_ptr<Session> keep = session;
    res.set_header(kVersionHeader, absl::StrCat(s.version()));
    res.set_chunked_content_provider(
        "application/x-ndjson",
        [keep, query = *q](size_t, httplib::DataSink& sink) {
          auto progress = [&sink](size_t done, size_t total) {
            const std::string line =
                Json{{"progress", {{"done", done}, {"total", total}}}}.dump() + "\n";
            sink.write(line.data(), line.size());
          };
          absl::StatusOr<SessionResult> result = keep->Pdp(query, progress);
          const std::string line =
              (result.ok() ? Json{{"version", result->version},
                                  {"result", result->body}}
                           : Json{{"error", ErrorToJson(result.status())}})
                  .dump() +
              "\n";
          sink.write(line.data(), line.size());
          sink.done();
          return true;
        });
  });

  server.Get("/analysis/performance", [&s](const httplib::Request& req,
                                           httplib::Response& res) {
    const Params params = QueryParams(req);
    if (absl::Status st = CheckVersion(s, params); !st.ok()) {
      SendError(res, st);
      return;
    }
    absl::StatusOr<PerformanceRequest> r =
        ParsePerformanceRequest(params, s.settings());
    absl::StatusOr<std::optional<ModelSlot>> model = GetSlotParam(params, "model");
    if (!r.ok() || !model.ok()) {
      SendError(res, !r.ok() ? r.status() : model.status());
      return;
    }
    SendResult(res, s.Performance(*std::move(r), *model));
  });

  server.Post("/analysis/fairness", [&s](const httplib::Request& req,
                                         httplib::Response& res) {
    absl::StatusOr<nlohmann::json> body = ParseBody(req);
    absl::StatusOr<Params> params =
        body.ok() ? ParamsFromJson(*body) : absl::StatusOr<Params>(body.status());
    if (!params.ok()) {
      SendError(res, params.status());
      return;
    }
    if (!GetParam(*params, "strategy")) {
      SendError(res, absl::InvalidArgumentError("parameter 'strategy': required"));
      return;
    }
    absl::StatusOr<PerformanceRequest> r =
        ParsePerformanceRequest(*params, s.settings());
    absl::StatusOr<std::optional<ModelSlot>> model = GetSlotParam(*params, "model");
    if (!r.ok() || !model.ok()) {
      SendError(res, !r.ok() ? r.status() : model.status());
      return;
    }
    SendResult(res, s.Performance(*std::move(r), *model));
  });
}

void HttpServer::Impl::Routes() {
  Session& s = *session;
  const bool cors = options.cors;

  server.set_pre_routing_handler(
      [cors](const httplib::Request& req, httplib::Response& res) {
        if (cors) {
          res.set_header("Access-Control-Allow-Origin", "*");
          res.set_header("Access-Control-Expose-Headers", kVersionHeader);
          if (req.method == "OPTIONS") {
            res.set_header("Access-Control-Allow-Methods",
                           "GET, POST, PATCH, DELETE, OPTIONS");
            res.set_header("Access-Control-Allow-Headers", "Content-Type");
            res.status = 204;
            return httplib::Server::HandlerResponse::Handled;
          }
        }
        return httplib::Server::HandlerResponse::Unhandled;
      });
  server.set_error_handler([](const httplib::Request& req,
                              httplib::Response& res) {
    if (!res.body.empty()) return;
    const absl::Status status =
        res.status == 404
            ? absl::NotFoundError(absl::StrCat("no route for ", req.method, " ",
                                               req.path))
            : absl::UnknownError(absl::StrCat("HTTP ", res.status));
    res.set_content(RenderJson(ErrorToJson(status)), kJsonType);
  });
  server.set_exception_handler(
      [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string what = "unexpected error";
        try {
          if (ep) std::rethrow_exception(ep);
        } catch (const std::exception& e) {
          what = e.what();
        } catch (...) {
        }
        SendError(res, absl::InternalError(what));
      });

  server.Get("/session", [&s](const httplib::Request&, httplib::Response& res) {
    SendResult(res, s.Info());
  });
  server.Post("/settings", [&s](const httplib::Request& req,
                                httplib::Response& res) {
    absl::StatusOr<nlohmann::json> body = ParseBody(req);
    if (!body.ok()) {
      SendError(res, body.status());
      return;
    }
    SendResult(res, s.UpdateSettings(*body));
  });

  server.Post("/models", [&s](const httplib::Request& req,
                              httplib::Response& res) {
    absl::StatusOr<nlohmann::json> body = ParseBody(req);
    if (!body.ok()) {
      SendError(res, body.status());
      return;
    }
    ModelSlot slot = ModelSlot::kModel1;
    if (body->contains("slot")) {
      const nlohmann::json& v = (*body)["slot"];
      absl::StatusOr<ModelSlot> parsed =
          v.is_string() ? ParseSlot(v.get<std::string>())
          : v.is_number_integer() ? ParseSlot(absl::StrCat(v.get<int>()))
                                  : absl::InvalidArgumentError("bad slot");
      if (!parsed.ok()) {
        SendError(res, parsed.status());
        return;
      }
      slot = *parsed;
    }
    absl::StatusOr<ModelSource> source = ModelSourceFromJson(*body);
    if (!source.ok()) {
      SendError(res, source.status());
      return;
    }
    std::string name = body->value("name", std::string(SlotName(slot)));
    const bool replace = body->value("replace", false);
    SendResult(res, s.RegisterModel(slot, *source, std::move(name), replace), 201);
  });

  server.Post("/predict", [&s](const httplib::Request& req,
                               httplib::Response& res) {
    absl::StatusOr<nlohmann::json> body = ParseBody(req);
    absl::StatusOr<PredictQuery> q =
        body.ok() ? PredictQueryFromJson(*body)
                  : absl::StatusOr<PredictQuery>(body.status());
    if (!q.ok()) {
      SendError(res, q.status());
      return;
    }
    SendResult(res, s.Predict(*q));
  });

  DatasetRoutes();
  AnalysisRoutes();

  if (options.ui_dir) {
    server.set_mount_point("/ui", *options.ui_dir);
  } else {
    server.Get(R"(/ui(/.*)?)", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(kPlaceholderPage, "text/html");
    });
  }
  server.Get("/", [](const httplib::Request&, httplib::Response& res) {
    res.set_redirect("/ui/");
  });
}

HttpServer::HttpServer(std::shared_ptr<Session> session, ServerOptions options)
    : impl_(std::make_unique<Impl>()) {
  impl_->session = std::move(session);
  impl_->options = std::move(options);
  // No SO_REUSEPORT: a second server on a busy port must fail to bind.
  impl_->server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR,
               reinterpret_cast<const char*>(&yes), sizeof(yes));
  });
  impl_->Routes();
}

HttpServer::~HttpServer() {
  Stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

absl::Status HttpServer::Bind() {
  std::lock_guard<std::mutex> lock(impl_->mu);
  if (impl_->bound) return absl::OkStatus();
  if (impl_->options.ui_dir &&
      !std::filesystem::is_directory(*impl_->options.ui_dir)) {
    return absl::InvalidArgumentError(
        absl::StrCat("ui directory '", *impl_->options.ui_dir, "' not found"));
  }
  if (impl_->options.port == 0) {
    const int port = impl_->server.bind_to_any_port(impl_->options.host);
    if (port < 0) {
      return absl::UnavailableError(
          absl::StrCat("cannot bind to ", impl_->options.host));
    }
    impl_->port = port;
  } else {
    if (!impl_->server.bind_to_port(impl_->options.host, impl_->options.port)) {
      return absl::UnavailableError(
          absl::StrCat("cannot bind to ", impl_->options.host, ":",
                       impl_->options.port, " (port in use?)"));
    }
    impl_->port = impl_->options.port;
  }
  impl_->bound = true;
  return absl::OkStatus();
}

int HttpServer::port() const { return impl_->port; }

absl::Status HttpServer::Run() {
  if (absl::Status s = Bind(); !s.ok()) return s;
  if (!impl_->server.listen_after_bind()) {
    return absl::InternalError("server stopped unexpectedly");
  }
  return absl::OkStatus();
}

absl::Status HttpServer::Start() {
  if (absl::Status s = Bind(); !s.ok()) return s;
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return absl::OkStatus();
}

void HttpServer::Stop() { impl_->server.stop(); }

}  // namespace whatif
