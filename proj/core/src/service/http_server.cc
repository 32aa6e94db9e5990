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

#include "polyloop/service/http_server.h"

#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace polyloop::service {
namespace {

using json = nlohmann::json;

void Reply(httplib::Response& res, int status, const std::string& body) {
  res.status = status;
  res.set_content(body, "application/json");
}

std::string ErrorJson(const std::string& message) {
  return json{{"accepted", false},
              {"reasons", json::array({{{"stimulus", nullptr}, {"reason", message}}})}}
      .dump();
}

// Maps library errors onto status codes.
void Guard(httplib::Response& res, const std::function<void()>& body) {
  try {
    body();
  } catch (const IncompleteRecordError& e) {
    Reply(res, 422, RejectionsJson(e.reasons()));
  } catch (const OutOfOrderError& e) {
    json j = json::parse(ErrorJson(e.what()));
    j["expected"] = e.expected();
    Reply(res, 409, j.dump());
  } catch (const DuplicateSubmissionError& e) {
    Reply(res, 409, ErrorJson(e.what()));
  } catch (const DuplicateSessionError& e) {
    Reply(res, 409, ErrorJson(e.what()));
  } catch (const UnknownSessionError& e) {
    Reply(res, 404, ErrorJson(e.what()));
  } catch (const NotConfiguredError& e) {
    Reply(res, 503, ErrorJson(e.what()));
  } catch (const ValidationError& e) {
    Reply(res, 400, ErrorJson(e.what()));
  } catch (const ParseError& e) {
    Reply(res, 400, ErrorJson(e.what()));
  } catch (const json::exception& e) {
    Reply(res, 400, ErrorJson(e.what()));
  } catch (const std::exception& e) {
    Reply(res, 500, ErrorJson(e.what()));
  }
}

json Body(const httplib::Request& req) {
  json j = json::parse(req.body);
  if (!j.is_object()) throw ValidationError("request body must be a JSON object");
  return j;
}

}  // namespace

struct HttpServer::Impl {
  RatingService& service;
  httplib::Server server;
  std::thread thread;
};

HttpServer::HttpServer(RatingService& service)
    : impl_(new Impl{service, {}, {}}) {
  auto& svc = impl_->service;
  auto& server = impl_->server;

  server.Post("/start", [&svc](const httplib::Request& req, httplib::Response& res) {
    Guard(res, [&] {
      const auto participant = Body(req).at("participant").get<std::string>();
      Reply(res, 200, StartResultJson(svc.Start(participant)));
    });
  });

  server.Get("/panel", [&svc](const httplib::Request& req, httplib::Response& res) {
    Guard(res, [&] {
      const auto view = svc.Current(req.get_param_value("token"));
      json j = {{"done", !view.has_value()}, {"panel", nullptr}};
      if (view) j["panel"] = json::parse(PanelViewJson(*view));
      Reply(res, 200, j.dump());
    });
  });

  server.Post("/submit", [&svc](const httplib::Request& req, httplib::Response& res) {
    Guard(res, [&] {
      const json body = Body(req);
      const auto record = RatingRecordFromJson(body.at("record").dump());
      Reply(res, 200, SubmitResultJson(svc.Submit(body.at("token").get<std::string>(), record)));
    });
  });

  server.Get("/report", [&svc](const httplib::Request& req, httplib::Response& res) {
    Guard(res, [&] {
      const auto report = svc.Report();
      if (req.get_param_value("format") == "text") {
        res.set_content(report.ToText(), "text/plain");
      } else {
        Reply(res, 200, report.ToJson());
      }
    });
  });

  server.Get(R"(/audio/([A-Za-z0-9]+))", [&svc](const httplib::Request& req,
                                                 httplib::Response& res) {
    const auto path = svc.Audio(req.matches[1]);
    std::ifstream in(path ? *path : std::filesystem::path{}, std::ios::binary);
    if (!path || !in) {
      Reply(res, 404, ErrorJson("no such audio"));
      return;
    }
    std::ostringstream data;
    data << in.rdbuf();
    res.set_content(data.str(), "audio/wav");
  });
}

HttpServer::~HttpServer() { Stop(); }

int HttpServer::Start(const std::string& host, int port) {
  auto& server = impl_->server;
  const int bound = port == 0 ? server.bind_to_any_port(host) : (server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw IoError("cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([&server] { server.listen_after_bind(); });
  server.wait_until_ready();
  return bound;
}

void HttpServer::Run(const std::string& host, int port) {
  if (!impl_->server.listen(host, port)) {
    throw IoError("cannot listen on " + host + ":" + std::to_string(port));
  }
}

void HttpServer::Stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace polyloop::service
