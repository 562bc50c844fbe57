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

#include "cli.h"

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "whatif/builtin_model.h"
#include "whatif/ingest.h"
#include "whatif/serialization.h"
#include "whatif/service/http_server.h"
#include "whatif/service/params.h"
#include "whatif/service/session.h"

namespace whatif {
namespace {

int ExitCodeFor(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kUnavailable:
    case absl::StatusCode::kDataLoss:
    case absl::StatusCode::kDeadlineExceeded:
    case absl::StatusCode::kInternal:
    case absl::StatusCode::kUnknown:
    case absl::StatusCode::kResourceExhausted:
      return kExitBackendError;
    default:
      return kExitInputError;
  }
}

absl::StatusOr<std::string> ReadInput(const std::string& path) {
  absl::StatusOr<std::string> bytes = ReadFileToString(path);
  if (!bytes.ok()) return absl::UnavailableError(bytes.status().message());
  return bytes;
}

std::optional<uint64_t> EnvUint(const char* name) {
  const char* v = std::getenv(name);
  uint64_t out = 0;
  if (v == nullptr || !absl::SimpleAtoi(v, &out)) return std::nullopt;
  return out;
}

struct ModelFlag {
  ModelSlot slot;
  ModelSource source;
  std::string name;
};

// "[slot=]<spec.json|http://...>".
absl::StatusOr<ModelFlag> ParseModelFlag(const std::string& value,
                                         ModelSlot default_slot,
                                         const std::string& task_text) {
  ModelFlag flag{default_slot, RemoteSource{}, ""};
  std::string target = value;
  if (const size_t eq = value.find('='); eq != std::string::npos &&
                                         value.find("://") > eq) {
    absl::StatusOr<ModelSlot> slot = ParseSlot(value.substr(0, eq));
    if (!slot.ok()) return slot.status();
    flag.slot = *slot;
    target = value.substr(eq + 1);
  }
  if (target.starts_with("http://")) {
    RemoteSource remote;
    remote.url = target;
    absl::StatusOr<TaskKind> task = ParseTaskKind(task_text);
    if (!task.ok()) return task.status();
    remote.task = *task;
    if (std::optional<uint64_t> n = EnvUint("WHATIF_MAX_IN_FLIGHT"); n && *n > 0) {
      remote.options.max_in_flight = *n;
    }
    flag.source = std::move(remote);
    flag.name = target;
    return flag;
  }
  absl::StatusOr<std::string> bytes = ReadInput(target);
  if (!bytes.ok()) return bytes.status();
  nlohmann::json doc = nlohmann::json::parse(*bytes, nullptr, false);
  if (doc.is_discarded()) {
    return absl::InvalidArgumentError(
        absl::StrCat("model spec '", target, "' is not valid JSON"));
  }
  absl::StatusOr<BuiltinModelSpec> spec = ParseBuiltinModelSpec(doc);
  if (!spec.ok()) {
    return absl::Status(spec.status().code(),
                        absl::StrCat(target, ": ", spec.status().message()));
  }
  flag.source = *std::move(spec);
  flag.name = std::filesystem::path(target).stem().string();
  return flag;
}

// Flags shared by the analysis subcommands.
struct Inputs {
  std::string dataset;
  std::vector<std::string> models;
  std::string model2;
  std::string task = "binary";
  std::string out;
  Params params;
};

void AddInputs(CLI::App* cmd, Inputs& in, bool needs_model) {
  cmd->add_option("--dataset", in.dataset, "CSV or JSONL dataset")->required();
  auto* model = cmd->add_option("--model", in.models,
                                "[slot=]<spec.json|http://host:port/path>");
  if (needs_model) model->required();
  cmd->add_option("--model2", in.model2, "second model for comparison");
  cmd->add_option("--task", in.task,
                  "task of remote models: binary, multiclass:K, regression");
  cmd->add_option("--out", in.out, "write the report here instead of stdout");
}

void AddParam(CLI::App* cmd, Params& params, const std::string& flag,
              const std::string& key, const std::string& help) {
  cmd->add_option_function<std::string>(
      flag, [&params, key](const std::string& v) { params[key] = v; }, help);
}

void AddFlagParam(CLI::App* cmd, Params& params, const std::string& flag,
                  const std::string& key, const std::string& help) {
  cmd->add_flag_callback(flag, [&params, key] { params[key] = "true"; }, help);
}

absl::Status LoadInputs(Session& session, const Inputs& in) {
  absl::StatusOr<std::string> bytes = ReadInput(in.dataset);
  if (!bytes.ok()) return bytes.status();
  absl::StatusOr<SessionResult> loaded =
      session.LoadDataset(*bytes, FormatFromPath(in.dataset),
                          std::filesystem::path(in.dataset).stem().string());
  if (!loaded.ok()) {
    return absl::Status(loaded.status().code(),
                        absl::StrCat(in.dataset, ": ", loaded.status().message()));
  }
  std::vector<std::pair<std::string, ModelSlot>> specs;
  for (size_t i = 0; i < in.models.size(); ++i) {
    specs.emplace_back(in.models[i], i == 0 ? ModelSlot::kModel1 : ModelSlot::kModel2);
  }
  if (!in.model2.empty()) specs.emplace_back(in.model2, ModelSlot::kModel2);
  for (const auto& [value, slot] : specs) {
    absl::StatusOr<ModelFlag> flag = ParseModelFlag(value, slot, in.task);
    if (!flag.ok()) return flag.status();
    absl::StatusOr<SessionResult> registered =
        session.RegisterModel(flag->slot, flag->source, flag->name);
    if (!registered.ok()) return registered.status();
  }
  return absl::OkStatus();
}

absl::Status Emit(const Json& body, const std::string& path, std::ostream& out) {
  const std::string text = RenderJson(body);
  if (path.empty()) {
    out << text;
    out.flush();
    return out ? absl::OkStatus() : absl::UnavailableError("cannot write output");
  }
  std::ofstream file(path, std::ios::binary);
  file << text;
  file.close();
  if (!file) {
    return absl::UnavailableError(absl::StrCat("cannot write '", path, "'"));
  }
  return absl::OkStatus();
}

absl::StatusOr<std::optional<ModelSlot>> SlotParam(const Params& params) {
  return GetSlotParam(params, "slot");
}

int Serve(const Inputs& in, int port, const std::string& host, bool cors,
          const std::string& ui_dir, std::ostream& err) {
  auto session = std::make_shared<Session>();
  if (!in.dataset.empty()) {
    if (absl::Status s = LoadInputs(*session, in); !s.ok()) {
      err << "whatif: " << s.message() << "\n";
      return ExitCodeFor(s);
    }
  } else if (!in.models.empty() || !in.model2.empty()) {
    err << "whatif: --model needs --dataset\n";
    return kExitInputError;
  }
  ServerOptions options;
  options.host = host;
  options.port = port;
  options.cors = cors;
  if (!ui_dir.empty()) options.ui_dir = ui_dir;

  // Block the shutdown signals before any server thread starts so that only
  // sigwait below receives them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  HttpServer server(session, options);
  if (absl::Status s = server.Start(); !s.ok()) {
    err << "whatif: " << s.message() << "\n";
    return kExitBackendError;
  }
  err << "whatif: serving on http://" << host << ":" << server.port() << "\n";
  int received = 0;
  sigwait(&signals, &received);
  err << "whatif: shutting down\n";
  server.Stop();
  return kExitOk;
}

}  // namespace

int RunCli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"What-if analysis for tabular models", "whatif"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "whatif 0.1.0");

  // serve
  Inputs serve_in;
  int port = 8080;
  if (std::optional<uint64_t> env = EnvUint("WHATIF_PORT")) {
    port = static_cast<int>(*env);
  }
  std::string host = "127.0.0.1";
  bool cors = false;
  std::string ui_dir;
  CLI::App* serve = app.add_subcommand("serve", "run the HTTP service");
  serve->add_option("--dataset", serve_in.dataset, "dataset to preload");
  serve->add_option("--model", serve_in.models,
                    "[slot=]<spec.json|http://host:port/path>");
  serve->add_option("--model2", serve_in.model2, "second model");
  serve->add_option("--task", serve_in.task, "task of remote models");
  serve->add_option("--port", port, "listen port (env WHATIF_PORT)");
  serve->add_option("--host", host, "listen address");
  serve->add_flag("--cors", cors, "allow cross-origin requests");
  serve->add_option("--ui-dir", ui_dir, "static workbench assets for /ui");

  // stats
  Inputs stats_in;
  CLI::App* stats = app.add_subcommand("stats", "feature summary statistics");
  AddInputs(stats, stats_in, false);
  std::string sort = "non-uniformity";
  stats->add_option("--sort", sort, "non-uniformity, missing or alpha");

  // counterfactual
  Inputs cf_in;
  CLI::App* cf = app.add_subcommand("counterfactual",
                                    "nearest point with a different outcome");
  AddInputs(cf, cf_in, true);
  AddParam(cf, cf_in.params, "--point", "point", "anchor point id");
  AddParam(cf, cf_in.params, "--norm", "norm", "l1 or l2");
  AddParam(cf, cf_in.params, "--threshold", "threshold",
           "positive classification threshold");
  AddParam(cf, cf_in.params, "--margin", "margin", "regression outcome margin");
  AddParam(cf, cf_in.params, "--slot", "model", "model1 or model2");

  // pdp
  Inputs pdp_in;
  CLI::App* pdp = app.add_subcommand("pdp", "partial dependence curve");
  AddInputs(pdp, pdp_in, true);
  AddParam(pdp, pdp_in.params, "--feature", "feature", "feature to sweep");
  AddParam(pdp, pdp_in.params, "--point", "point", "local curve for this point");
  AddFlagParam(pdp, pdp_in.params, "--global", "global",
               "average over every point (default)");
  AddParam(pdp, pdp_in.params, "--range", "range", "numeric sweep range lo:hi");
  AddParam(pdp, pdp_in.params, "--num-points", "num_points", "numeric grid size");
  AddParam(pdp, pdp_in.params, "--values", "values",
           "categorical values, comma separated");
  AddParam(pdp, pdp_in.params, "--top-n", "top_n", "classes per multiclass model");
  AddParam(pdp, pdp_in.params, "--slot", "model", "only this model");

  // performance
  Inputs perf_in;
  CLI::App* perf = app.add_subcommand("performance",
                                      "performance and fairness report");
  AddInputs(perf, perf_in, true);
  AddParam(perf, perf_in.params, "--label", "label", "ground-truth feature");
  AddParam(perf, perf_in.params, "--positive", "positive", "positive class value");
  AddParam(perf, perf_in.params, "--classes", "classes",
           "multiclass label order, comma separated");
  AddParam(perf, perf_in.params, "--slice-by", "slice_by", "f1[,f2]");
  AddParam(perf, perf_in.params, "--bins", "bins", "bins for numeric slices");
  AddParam(perf, perf_in.params, "--cost-ratio", "cost_ratio",
           "false positive cost / false negative cost");
  AddParam(perf, perf_in.params, "--strategy", "strategy",
           "single, group, demographic-parity, equal-opportunity, "
           "equal-accuracy");
  AddParam(perf, perf_in.params, "--epsilon", "epsilon", "parity tolerance");
  AddParam(perf, perf_in.params, "--threshold", "threshold", "global threshold");
  AddParam(perf, perf_in.params, "--thresholds", "thresholds",
           "per-slice thresholds as a JSON object");
  AddParam(perf, perf_in.params, "--sort", "sort", "count, alpha or accuracy");
  AddParam(perf, perf_in.params, "--slot", "model", "only this model");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    if (e.get_exit_code() != 0) err << app.help();
    return kExitInputError;
  }

  if (serve->parsed()) {
    return Serve(serve_in, port, host, cors, ui_dir, err);
  }

  Session session;
  const Inputs& in = stats->parsed() ? stats_in
                     : cf->parsed()  ? cf_in
                     : pdp->parsed() ? pdp_in
                                     : perf_in;
  auto run = [&]() -> absl::StatusOr<SessionResult> {
    if (absl::Status s = LoadInputs(session, in); !s.ok()) return s;
    if (stats->parsed()) {
      absl::StatusOr<FeatureSortKey> key = ParseSortKey(sort);
      if (!key.ok()) return key.status();
      return session.Stats(*key);
    }
    if (cf->parsed()) {
      absl::StatusOr<CounterfactualQuery> q = ParseCounterfactualQuery(in.params);
      if (!q.ok()) return q.status();
      return session.Counterfactual(*q);
    }
    if (pdp->parsed()) {
      absl::StatusOr<PdpQuery> q = ParsePdpQuery(in.params);
      if (!q.ok()) return q.status();
      return session.Pdp(*q);
    }
    absl::StatusOr<PerformanceRequest> r =
        ParsePerformanceRequest(in.params, session.settings());
    if (!r.ok()) return r.status();
    absl::StatusOr<std::optional<ModelSlot>> slot = SlotParam(in.params);
    if (!slot.ok()) return slot.status();
    return session.Performance(*std::move(r), *slot);
  };
  absl::StatusOr<SessionResult> result = run();
  if (!result.ok()) {
    err << "whatif: " << result.status().message() << "\n";
    return ExitCodeFor(result.status());
  }
  if (absl::Status s = Emit(result->body, in.out, out); !s.ok()) {
    err << "whatif: " << s.message() << "\n";
    return kExitBackendError;
  }
  return kExitOk;
}

}  // namespace whatif
