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

#ifndef POLYLOOP_SERVICE_RATING_SERVICE_H_
#define POLYLOOP_SERVICE_RATING_SERVICE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "polyloop/common/error.h"
#include "polyloop/mushra/design.h"
#include "polyloop/mushra/report.h"
#include "polyloop/service/store.h"

namespace polyloop::service {

inline constexpr const char* kStoreDirEnv = "POLYLOOP_STORE_DIR";

class NotConfiguredError : public Error {
 public:
  NotConfiguredError() : Error("no experiment configured") {}
};

class UnknownSessionError : public ValidationError {
 public:
  explicit UnknownSessionError(const std::string& token)
      : ValidationError("unknown session token '" + token + "'") {}
};

// A participant who already finished cannot open a second session.
class DuplicateSessionError : public ValidationError {
 public:
  explicit DuplicateSessionError(const std::string& participant)
      : ValidationError("participant '" + participant + "' already completed the experiment") {}
};

class OutOfOrderError : public ValidationError {
 public:
  OutOfOrderError(const std::string& got, const std::string& expected)
      : ValidationError("panel '" + got + "' submitted out of order; expected '" +
                        expected + "'"),
        expected_(expected) {}
  const std::string& expected() const { return expected_; }

 private:
  std::string expected_;
};

class DuplicateSubmissionError : public ValidationError {
 public:
  explicit DuplicateSubmissionError(const std::string& panel)
      : ValidationError("panel '" + panel + "' was already submitted") {}
};

struct Rejection {
  std::string stimulus;  // empty for record-level problems
  std::string reason;
};

class IncompleteRecordError : public ValidationError {
 public:
  explicit IncompleteRecordError(std::vector<Rejection> reasons);
  const std::vector<Rejection>& reasons() const { return reasons_; }

 private:
  std::vector<Rejection> reasons_;
};

struct ServiceOptions {
  std::filesystem::path store_dir = "ratings";
  std::uint64_t seed = 1;
  int anomaly_margin = mushra::kDefaultAnomalyMargin;
  double alpha = 0.05;
  bool check_audio = true;

  // Defaults, with store_dir taken from POLYLOOP_STORE_DIR when set.
  static ServiceOptions FromEnvironment();
};

struct SessionState {
  std::string participant;
  std::string token;
  std::size_t test_set = 0;  // 0-based
  std::vector<std::string> panel_ids;  // delivery order, fixed at start
  std::vector<std::string> completed;  // prefix of panel_ids

  std::size_t current() const { return completed.size(); }
  bool done() const { return completed.size() == panel_ids.size(); }
  bool operator==(const SessionState&) const = default;
};

// What a rater may see of a panel. Built only from opaque ids.
struct PanelView {
  std::string panel;
  std::size_t index = 0;  // 0-based position in the session
  std::size_t total = 0;
  std::string reference_audio_id;
  struct Item {
    std::string id;
    std::string audio_id;
    int initial_value = 0;
  };
  std::vector<Item> stimuli;
};

struct StartResult {
  std::string token;
  std::size_t test_set = 0;
  bool resumed = false;
  std::optional<PanelView> panel;  // empty when the session is done
};

struct SubmitResult {
  std::optional<PanelView> next;  // empty when done
  bool done() const { return !next.has_value(); }
};

// Thread-safe. Every accepted rating is written to the store before the
// next panel is returned; a new instance over the same store directory
// replays it and reconstructs all sessions.
class RatingService {
 public:
  explicit RatingService(ServiceOptions options);
  ~RatingService();

  // Validates the design (including audio when options.check_audio) and
  // replays <store_dir>/<design.name>.jsonl.
  void Configure(mushra::MushraDesign design);
  bool configured() const;
  const ServiceOptions& options() const { return options_; }
  std::filesystem::path store_path() const;

  // Round-robin test-set assignment by arrival order. A participant with
  // an unfinished session resumes it at the first incomplete panel.
  StartResult Start(const std::string& participant);
  std::optional<PanelView> Current(const std::string& token) const;
  SubmitResult Submit(const std::string& token, const mushra::RatingRecord& record);

  std::vector<SessionState> Sessions() const;
  // Accepted ratings keyed by system, in store order.
  std::vector<mushra::PanelScores> Records() const;
  // Anomaly filter followed by the full analysis.
  mushra::AnalysisReport Report() const;

  // Audio file behind an opaque id handed out in a PanelView.
  std::optional<std::filesystem::path> Audio(const std::string& audio_id) const;

 private:
  struct Session;
  void RequireConfigured() const;
  Session& Open(const std::string& participant, const std::string& token,
                std::size_t test_set);
  PanelView View(const Session& session) const;
  void Apply(Session& session, const mushra::RatingRecord& record);
  void Replay();

  ServiceOptions options_;
  std::optional<mushra::MushraDesign> design_;
  std::unique_ptr<RatingStore> store_;
  mutable std::mutex mu_;
  std::vector<std::unique_ptr<Session>> sessions_;  // arrival order
  std::map<std::string, Session*> by_token_;
  std::map<std::string, Session*> by_participant_;
  std::map<std::string, std::filesystem::path> audio_;
  std::vector<mushra::PanelScores> records_;
};

// JSON payloads for the rater-facing endpoints.
std::string PanelViewJson(const PanelView& view);
std::string StartResultJson(const StartResult& result);
std::string SubmitResultJson(const SubmitResult& result);
std::string RejectionsJson(const std::vector<Rejection>& reasons);
mushra::RatingRecord RatingRecordFromJson(const std::string& json);
std::string RatingRecordToJson(const mushra::RatingRecord& record);

}  // namespace polyloop::service

#endif  // POLYLOOP_SERVICE_RATING_SERVICE_H_
