// Copyright 2026 The polyloop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef POLYLOOP_SERVICE_HTTP_SERVER_H_
#define POLYLOOP_SERVICE_HTTP_SERVER_H_

#include <memory>
#include <string>

#include "polyloop/service/rating_service.h"

namespace polyloop::service {

// JSON over HTTP on a local socket.
//
//   POST /start   {"participant": id}
//        -> {"token", "test_set", "resumed", "done", "panel"}
//   GET  /panel?token=T
//        -> {"done", "panel"}
//   POST /submit  {"token": T, "record": {"panel", "scores": {stimulus: 0..100},
//                  "all_listened", "all_moved", "timestamp"?}}
//        -> {"accepted": true, "done", "next"}
//        -> 422 {"accepted": false, "reasons": [{"stimulus", "reason"}]}
//        -> 409 for duplicate or out-of-order panels
//   GET  /report[?format=text]
//   GET  /audio/<id>
//
// A panel is {"panel", "index", "total", "reference": {"audio"},
// "stimuli": [{"id", "audio", "initial_value"}]}; it carries no system ids.
class HttpServer {
 public:
  explicit HttpServer(RatingService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds (port 0 picks a free one) and serves on a background thread.
  // Returns the bound port.
  int Start(const std::string& host, int port);
  // Binds and serves on the calling thread until Stop().
  void Run(const std::string& host, int port);
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace polyloop::service

#endif  // POLYLOOP_SERVICE_HTTP_SERVER_H_
