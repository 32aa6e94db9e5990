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

#include "polyloop/service/rating_service.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <random>

#include <json.hpp>

#include "polyloop/common/random.h"

namespace polyloop::service {
namespace {

using json = nlohmann::json;
using mushra::MushraPanel;
using mushra::RatingRecord;

std::string Hex(std::uint64_t v, int digits) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%0*llx", digits, static_cast<unsigned long long>(v));
  return std::string(buf).substr(0, static_cast<std::size_t>(digits));
}

std::string NewToken() {
  std::random_device rd;
  std::uint64_t a = (std::uint64_t{rd()} << 32) | rd();
  std::uint64_t b = (std::uint64_t{rd()} << 32) | rd();
  return Hex(a, 16) + Hex(b, 16);
}

std::string UtcNow() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Identity of the experiment a store belongs to. The audio location may
// move without invalidating the ratings.
std::string DesignKey(const mushra::MushraDesign& design) {
  json j = json::parse(design.ToJson());
  j.erase("audio_root");
  return Hex(Fnv1a(j.dump()), 16);
}

}  // namespace

IncompleteRecordError::IncompleteRecordError(std::vector<Rejection> reasons)
    : ValidationError([&] {
        std::string msg = "rating rejected:";
        for (const auto& r : reasons) {
          msg += " [" + (r.stimulus.empty() ? std::string("record") : r.stimulus) +
                 ": " + r.reason + "]";
        }
        return msg;
      }()),
      reasons_(std::move(reasons)) {}

ServiceOptions ServiceOptions::FromEnvironment() {
  ServiceOptions options;
  if (const char* dir = std::getenv(kStoreDirEnv); dir && *dir) {
    options.store_dir = dir;
  }
  return options;
}

struct RatingService::Session {
  SessionState state;
  std::vector<MushraPanel> panels;
  std::vector<std::string> reference_ids;
};

RatingService::RatingService(ServiceOptions options) : options_(std::move(options)) {}
RatingService::~RatingService() = default;

bool RatingService::configured() const {
  std::lock_guard lock(mu_);
  return design_.has_value();
}

void RatingService::RequireConfigured() const {
  if (!design_) throw NotConfiguredError();
}

std::filesystem::path RatingService::store_path() const {
  std::lock_guard lock(mu_);
  RequireConfigured();
  return store_->path();
}

void RatingService::Configure(mushra::MushraDesign design) {
  design.Validate(options_.check_audio);
  if (design.name.empty()) throw ValidationError("experiment needs a name");
  std::lock_guard lock(mu_);
  design_ = std::move(design);
  sessions_.clear();
  by_token_.clear();
  by_participant_.clear();
  audio_.clear();
  records_.clear();
  store_ = std::make_unique<RatingStore>(options_.store_dir / (design_->name + ".jsonl"));
  try {
    Replay();
  } catch (...) {
    design_.reset();
    store_.reset();
    throw;
  }
}

RatingService::Session& RatingService::Open(const std::string& participant,
                                            const std::string& token,
                                            std::size_t test_set) {
  auto session = std::make_unique<Session>();
  session->panels = mushra::GeneratePanels(*design_, participant, test_set,
                                           options_.seed, /*check_audio=*/false);
  session->state.participant = participant;
  session->state.token = token;
  session->state.test_set = test_set;
  const std::uint64_t key = MixSeed(options_.seed, participant);
  for (const auto& panel : session->panels) {
    session->state.panel_ids.push_back(panel.id);
    const std::string ref = "r" + Hex(MixSeed(key, panel.id + "\treference"), 12);
    session->reference_ids.push_back(ref);
    audio_[ref] = panel.reference_audio;
    for (const auto& s : panel.stimuli) audio_[s.id] = s.audio;
  }
  Session& out = *session;
  by_token_[token] = &out;
  by_participant_[participant] = &out;
  sessions_.push_back(std::move(session));
  return out;
}

PanelView RatingService::View(const Session& session) const {
  const std::size_t k = session.state.current();
  const MushraPanel& panel = session.panels[k];
  PanelView view;
  view.panel = panel.id;
  view.index = k;
  view.total = session.panels.size();
  view.reference_audio_id = session.reference_ids[k];
  for (const auto& s : panel.stimuli) {
    view.stimuli.push_back({s.id, s.id, s.initial_value});
  }
  return view;
}

void RatingService::Apply(Session& session, const RatingRecord& record) {
  const MushraPanel& panel = session.panels[session.state.current()];
  mushra::PanelScores scores;
  scores.participant = session.state.participant;
  scores.panel = panel.id;
  for (const auto& s : panel.stimuli) scores.scores[s.system] = record.scores.at(s.id);
  records_.push_back(std::move(scores));
  session.state.completed.push_back(panel.id);
}

void RatingService::Replay() {
  const auto lines = store_->ReadAll();
  const std::string source = store_->path().string();
  const std::string key = DesignKey(*design_);
  if (lines.empty()) {
    json header = {{"type", "experiment"},
                   {"name", design_->name},
                   {"design", key},
                   {"seed", options_.seed}};
    store_->Append(header.dump());
    return;
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int line_no = static_cast<int>(i + 1);
    json j;
    try {
      j = json::parse(lines[i]);
    } catch (const json::exception& e) {
      throw ParseError(source, line_no, e.what());
    }
    try {
      const std::string type = j.at("type").get<std::string>();
      if (i == 0) {
        if (type != "experiment") throw ParseError(source, 1, "missing experiment header");
        if (j.at("design").get<std::string>() != key ||
            j.at("seed").get<std::uint64_t>() != options_.seed) {
          throw ValidationError("store " + source +
                                " belongs to a different experiment configuration");
        }
      } else if (type == "session") {
        const std::string participant = j.at("participant").get<std::string>();
        if (by_participant_.count(participant)) {
          throw ParseError(source, line_no, "second session for " + participant);
        }
        Session& s = Open(participant, j.at("token").get<std::string>(),
                          j.at("test_set").get<std::size_t>());
        if (j.at("panels").get<std::vector<std::string>>() != s.state.panel_ids) {
          throw ParseError(source, line_no, "panel order does not match the design");
        }
      } else if (type == "rating") {
        const RatingRecord record = RatingRecordFromJson(lines[i]);
        auto it = by_token_.find(j.at("token").get<std::string>());
        if (it == by_token_.end()) throw ParseError(source, line_no, "rating for unknown session");
        Session& s = *it->second;
        if (s.state.done() || s.state.panel_ids[s.state.current()] != record.panel) {
          throw ParseError(source, line_no, "rating out of session order");
        }
        Apply(s, record);
      } else {
        throw ParseError(source, line_no, "unknown record type '" + type + "'");
      }
    } catch (const json::exception& e) {
      throw ParseError(source, line_no, e.what());
    } catch (const std::out_of_range& e) {
      throw ParseError(source, line_no, "rating does not cover the panel");
    }
  }
}

StartResult RatingService::Start(const std::string& participant) {
  if (participant.empty()) throw ValidationError("participant id must not be empty");
  std::lock_guard lock(mu_);
  RequireConfigured();
  StartResult result;
  Session* session = nullptr;
  if (auto it = by_participant_.find(participant); it != by_participant_.end()) {
    if (it->second->state.done()) throw DuplicateSessionError(participant);
    session = it->second;
    result.resumed = true;
  } else {
    const std::size_t test_set = sessions_.size() % design_->test_sets.size();
    const std::string token = NewToken();
    // Panel order is fixed here; record it for audit and replay checks.
    auto panels = mushra::GeneratePanels(*design_, participant, test_set, options_.seed, false);
    json line = {{"type", "session"},     {"participant", participant},
                 {"token", token},        {"test_set", test_set},
                 {"panels", json::array()}, {"timestamp", UtcNow()}};
    for (const auto& p : panels) line["panels"].push_back(p.id);
    store_->Append(line.dump());
    session = &Open(participant, token, test_set);
  }
  result.token = session->state.token;
  result.test_set = session->state.test_set;
  if (!session->state.done()) result.panel = View(*session);
  return result;
}

std::optional<PanelView> RatingService::Current(const std::string& token) const {
  std::lock_guard lock(mu_);
  RequireConfigured();
  auto it = by_token_.find(token);
  if (it == by_token_.end()) throw UnknownSessionError(token);
  if (it->second->state.done()) return std::nullopt;
  return View(*it->second);
}

SubmitResult RatingService::Submit(const std::string& token, const RatingRecord& record) {
  std::lock_guard lock(mu_);
  RequireConfigured();
  auto it = by_token_.find(token);
  if (it == by_token_.end()) throw UnknownSessionError(token);
  Session& session = *it->second;
  const auto& done = session.state.completed;
  if (std::find(done.begin(), done.end(), record.panel) != done.end()) {
    throw DuplicateSubmissionError(record.panel);
  }
  if (session.state.done()) throw OutOfOrderError(record.panel, "");
  const MushraPanel& panel = session.panels[session.state.current()];
  if (record.panel != panel.id) throw OutOfOrderError(record.panel, panel.id);

  std::vector<Rejection> reasons;
  if (!record.participant.empty() && record.participant != session.state.participant) {
    reasons.push_back({"", "participant does not match the session"});
  }
  if (!record.all_listened) reasons.push_back({"", "not every sample was played to the end"});
  if (!record.all_moved) reasons.push_back({"", "not every slider was moved"});
  for (const auto& s : panel.stimuli) {
    auto score = record.scores.find(s.id);
    if (score == record.scores.end()) {
      reasons.push_back({s.id, "no rating"});
    } else if (score->second < 0 || score->second > 100) {
      reasons.push_back({s.id, "score " + std::to_string(score->second) + " outside 0..100"});
    } else if (score->second == s.initial_value) {
      reasons.push_back({s.id, "slider left at its initial value"});
    }
  }
  for (const auto& [id, value] : record.scores) {
    if (!panel.FindStimulus(id)) reasons.push_back({id, "not part of this panel"});
  }
  if (!reasons.empty()) throw IncompleteRecordError(std::move(reasons));

  RatingRecord stored = record;
  stored.participant = session.state.participant;
  if (stored.timestamp.empty()) stored.timestamp = UtcNow();
  json line = json::parse(RatingRecordToJson(stored));
  line["type"] = "rating";
  line["token"] = token;
  store_->Append(line.dump());
  Apply(session, stored);

  SubmitResult result;
  if (!session.state.done()) result.next = View(session);
  return result;
}

std::vector<SessionState> RatingService::Sessions() const {
  std::lock_guard lock(mu_);
  std::vector<SessionState> out;
  for (const auto& s : sessions_) out.push_back(s->state);
  return out;
}

std::vector<mushra::PanelScores> RatingService::Records() const {
  std::lock_guard lock(mu_);
  return records_;
}

mushra::AnalysisReport RatingService::Report() const {
  std::lock_guard lock(mu_);
  RequireConfigured();
  auto filtered = mushra::FilterAnomalies(records_, design_->reference, options_.anomaly_margin);
  std::vector<std::string> systems = design_->systems;
  systems.insert(systems.begin(), design_->reference);
  auto report = mushra::BuildReport(filtered.kept, systems, options_.alpha);
  report.discarded = filtered.discarded.size();
  return report;
}

std::optional<std::filesystem::path> RatingService::Audio(const std::string& audio_id) const {
  std::lock_guard lock(mu_);
  auto it = audio_.find(audio_id);
  if (it == audio_.end()) return std::nullopt;
  return it->second;
}

namespace {

json ViewToJson(const PanelView& view) {
  json j = {{"panel", view.panel},
            {"index", view.index},
            {"total", view.total},
            {"reference", {{"audio", "/audio/" + view.reference_audio_id}}},
            {"stimuli", json::array()}};
  for (const auto& s : view.stimuli) {
    j["stimuli"].push_back(
        {{"id", s.id}, {"audio", "/audio/" + s.audio_id}, {"initial_value", s.initial_value}});
  }
  return j;
}

}  // namespace

std::string PanelViewJson(const PanelView& view) { return ViewToJson(view).dump(); }

std::string StartResultJson(const StartResult& result) {
  json j = {{"token", result.token},
            {"test_set", result.test_set + 1},
            {"resumed", result.resumed},
            {"done", !result.panel.has_value()},
            {"panel", nullptr}};
  if (result.panel) j["panel"] = ViewToJson(*result.panel);
  return j.dump();
}

std::string SubmitResultJson(const SubmitResult& result) {
  json j = {{"accepted", true}, {"done", result.done()}, {"next", nullptr}};
  if (result.next) j["next"] = ViewToJson(*result.next);
  return j.dump();
}

std::string RejectionsJson(const std::vector<Rejection>& reasons) {
  json j = {{"accepted", false}, {"reasons", json::array()}};
  for (const auto& r : reasons) {
    j["reasons"].push_back({{"stimulus", r.stimulus.empty() ? json(nullptr) : json(r.stimulus)},
                            {"reason", r.reason}});
  }
  return j.dump();
}

RatingRecord RatingRecordFromJson(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError("rating", 1, e.what());
  }
  if (!j.is_object()) throw ValidationError("rating must be an object");
  RatingRecord r;
  try {
    r.participant = j.value("participant", "");
    r.panel = j.at("panel").get<std::string>();
    r.all_listened = j.value("all_listened", false);
    r.all_moved = j.value("all_moved", false);
    r.timestamp = j.value("timestamp", "");
    for (const auto& [id, v] : j.at("scores").items()) {
      if (!v.is_number_integer()) {
        throw ValidationError("score for '" + id + "' must be an integer");
      }
      r.scores[id] = v.get<int>();
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed rating: ") + e.what());
  }
  return r;
}

std::string RatingRecordToJson(const RatingRecord& r) {
  json j = {{"participant", r.participant},
            {"panel", r.panel},
            {"scores", r.scores},
            {"all_listened", r.all_listened},
            {"all_moved", r.all_moved},
            {"timestamp", r.timestamp}};
  return j.dump();
}

}  // namespace polyloop::service
