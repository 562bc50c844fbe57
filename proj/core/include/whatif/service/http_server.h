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

#ifndef WHATIF_SERVICE_HTTP_SERVER_H_
#define WHATIF_SERVICE_HTTP_SERVER_H_

#include <memory>
#include <optional>
#include <string>

#include "absl/status/status.h"
#include "whatif/service/session.h"

namespace whatif {

struct ServerOptions {
  std::string host = "127.0.0.1";
  // 0 picks a free port.
  int port = 8080;
  // Adds permissive CORS headers and answers preflight requests.
  bool cors = false;
  // Directory of static workbench assets served under /ui.
  std::optional<std::string> ui_dir;
};

// HTTP status for a failed operation.
int HttpStatusFor(const absl::Status& status);

// JSON-over-HTTP front end for one session. Every analysis response carries
// the snapshot version in the X-Snapshot-Version header.
class HttpServer {
 public:
  HttpServer(std::shared_ptr<Session> session, ServerOptions options);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds the listening socket. Fails when the port is taken.
  absl::Status Bind();
  // The bound port, valid after Bind().
  int port() const;
  // Serves until Stop(). Binds first if needed.
  absl::Status Run();
  // Bind() plus Run() on a background thread.
  absl::Status Start();
  // Stops serving; in-flight requests finish first. Safe from any thread.
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace whatif

#endif  // WHATIF_SERVICE_HTTP_SERVER_H_
