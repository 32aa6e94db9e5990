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

// polyloop: command-line front end for corpus preparation, training,
// strategy planning and the listening test.

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "polyloop/acoustic/model.h"
#include "polyloop/classweight/class_weights.h"
#include "polyloop/corpus/features.h"
#include "polyloop/corpus/manifest.h"
#include "polyloop/corpus/synthetic.h"
#include "polyloop/mushra/design.h"
#include "polyloop/service/http_server.h"
#include "polyloop/service/rating_service.h"
#include "polyloop/strategies/strategy.h"
#include "polyloop/trainer/trainer.h"

namespace {

using namespace polyloop;
using json = nlohmann::json;

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Splits "a=b" pairs into a map.
std::map<std::string, std::string> Pairs(const std::vector<std::string>& items) {
  std::map<std::string, std::string> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ValidationError("expected from=to, got '" + item + "'");
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

std::vector<std::string> Split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

int Weights(const std::string& manifest_path, const std::string& factor) {
  const auto manifest = corpus::LoadManifest(manifest_path, {.check_files = false});
  if (factor == "speaker" || factor == "both") {
    classweight::ClassWeightTable t(classweight::ClassCounts::FromMap(manifest.SpeakerCounts()));
    std::cout << classweight::FormatTable("speaker", t);
  }
  if (factor == "language" || factor == "both") {
    classweight::ClassWeightTable t(classweight::ClassCounts::FromMap(manifest.LanguageCounts()));
    std::cout << classweight::FormatTable("language", t);
  }
  return 0;
}

struct TrainArgs {
  std::string config, manifest, stage = "both", out = "model.ckpt", init, log;
  std::optional<std::uint64_t> seed;
};

int Train(const TrainArgs& a) {
  json cfg = json::object();
  if (!a.config.empty()) cfg = json::parse(ReadFile(a.config));
  auto plan = trainer::TrainPlan::FromJson(cfg.value("plan", json::object()).dump());
  if (a.seed) plan.seed = *a.seed;
  plan.Validate();
  const auto corpus = corpus::LoadCorpus(corpus::LoadManifest(a.manifest));

  std::optional<acoustic::AcousticModel<float>> model;
  if (!a.init.empty()) {
    model.emplace(acoustic::AcousticModel<float>::Load(a.init));
  } else {
    auto base = acoustic::ModelConfig::FromJson(cfg.value("model", json::object()).dump());
    model.emplace(acoustic::ModelConfig::FromCorpus(corpus, base));
  }
  std::cerr << "parameters: " << model->params().ScalarCount() << "\n";

  std::optional<trainer::TrainLog> log;
  if (!a.log.empty()) log.emplace(a.log); else log.emplace();
  trainer::Trainer t(*model, corpus, plan, &*log);
  std::cerr << "weighting: " << classweight::ToString(t.weighting()) << "\n";
  for (const auto& r : t.Run(trainer::ParseStageSelection(a.stage))) {
    std::cout << trainer::ToString(r.stage) << "\tsteps " << r.steps << "\tinitial "
              << r.initial_loss() << "\tfinal " << r.final_loss() << "\n";
  }
  model->Save(a.out);
  std::cerr << "saved " << a.out << "\n";
  return 0;
}

struct PlanArgs {
  std::string strategy, specs, pool, out;
  std::uint64_t seed = 1;
  std::vector<std::string> bind_speakers, bind_languages;
  bool list = false;
};

int Plan(const PlanArgs& a) {
  std::vector<strategies::StrategySpec> specs = strategies::BuiltinSpecs();
  if (!a.specs.empty()) {
    auto custom = strategies::LoadSpecs(a.specs);
    specs.insert(specs.end(), custom.begin(), custom.end());
  }
  if (a.list) {
    for (const auto& s : specs) std::cout << s.ToJson() << "\n";
    return 0;
  }
  const strategies::StrategySpec* spec = nullptr;
  for (const auto& s : specs) {
    if (s.name == a.strategy) spec = &s;  // later definitions win
  }
  if (!spec) throw ValidationError("unknown strategy '" + a.strategy + "'");
  if (a.pool.empty() || a.out.empty()) throw ValidationError("--pool and --out are required");
  const auto pool = corpus::LoadManifest(a.pool, {.check_files = false});
  strategies::Binding binding{Pairs(a.bind_speakers), Pairs(a.bind_languages)};
  const auto manifest = strategies::Materialize(*spec, pool, a.seed, binding);
  corpus::SaveManifest(manifest, a.out);
  std::cout << spec->name << ": " << manifest.entries.size() << " utterances -> " << a.out << "\n";
  return 0;
}

struct ServeArgs {
  std::string experiment, host = "127.0.0.1", store_dir;
  int port = 8080;
  std::uint64_t seed = 1;
  int margin = mushra::kDefaultAnomalyMargin;
  double alpha = 0.05;
};

service::ServiceOptions Options(const ServeArgs& a) {
  auto o = service::ServiceOptions::FromEnvironment();
  if (!a.store_dir.empty()) o.store_dir = a.store_dir;
  o.seed = a.seed;
  o.anomaly_margin = a.margin;
  o.alpha = a.alpha;
  return o;
}

service::HttpServer* g_server = nullptr;

int Serve(const ServeArgs& a) {
  service::RatingService svc(Options(a));
  svc.Configure(mushra::MushraDesign::Load(a.experiment));
  service::HttpServer server(svc);
  g_server = &server;
  std::signal(SIGINT, [](int) { if (g_server) g_server->Stop(); });
  std::signal(SIGTERM, [](int) { if (g_server) g_server->Stop(); });
  std::cerr << "store " << svc.store_path() << "\nlistening on " << a.host << ":" << a.port
            << "\n";
  server.Run(a.host, a.port);
  g_server = nullptr;
  return 0;
}

int Analyze(ServeArgs a, bool as_json, const std::string& boxplot) {
  auto o = Options(a);
  o.check_audio = false;
  service::RatingService svc(o);
  svc.Configure(mushra::MushraDesign::Load(a.experiment));
  const auto report = svc.Report();
  std::cout << (as_json ? report.ToJson() : report.ToText());
  if (!boxplot.empty()) {
    std::ofstream out(boxplot);
    out << report.BoxplotTsv();
    if (!out) throw IoError("cannot write " + boxplot);
  }
  return 0;
}

struct SynthCorpusArgs {
  std::string out;
  std::vector<std::string> languages = {"xx:12"};
  std::vector<std::string> speakers = {"spk1:xx:10"};
  std::size_t mel_bins = 80;
  std::uint64_t seed = 1;
};

int SynthCorpus(const SynthCorpusArgs& a) {
  corpus::SyntheticCorpusConfig c;
  for (const auto& l : a.languages) {
    const auto parts = Split(l, ':');
    if (parts.size() != 2) throw ValidationError("language must be code:phonemes, got " + l);
    c.languages.push_back({parts[0], std::stoul(parts[1])});
  }
  for (const auto& s : a.speakers) {
    const auto parts = Split(s, ':');
    if (parts.size() != 3) throw ValidationError("speaker must be id:language:count, got " + s);
    c.speakers.push_back({parts[0], parts[1], std::stoul(parts[2])});
  }
  c.mel_bins = a.mel_bins;
  c.seed = a.seed;
  const auto manifest = corpus::WriteCorpus(corpus::GenerateSyntheticCorpus(c), a.out);
  std::cout << manifest.entries.size() << " utterances -> " << a.out << "/manifest.tsv\n";
  return 0;
}

int Features(const std::string& wav, const std::string& out, std::size_t bins) {
  const auto audio = corpus::ReadWav(wav);
  corpus::MelFeatureConfig config;
  config.sample_rate = audio.sample_rate;
  config.fmax = audio.sample_rate / 2.0;
  config.mel_bins = bins;
  const auto mel = corpus::ComputeLogMel(audio.samples, config);
  corpus::WriteMelFile(out, mel);
  std::cout << mel.frames() << " frames x " << mel.bins() << " bins -> " << out << "\n";
  return 0;
}

struct SynthesizeArgs {
  std::string checkpoint, phoneset, phonemes, language, speaker, out;
  std::size_t max_frames = 1000;
};

int Synthesize(const SynthesizeArgs& a) {
  const auto model = acoustic::AcousticModel<float>::Load(a.checkpoint);
  const auto phoneset = corpus::Phoneset::Load(a.language, a.phoneset);
  std::vector<std::string> symbols;
  std::istringstream in(a.phonemes);
  for (std::string s; in >> s;) symbols.push_back(s);
  const auto ids = phoneset.Encode(symbols);
  const auto result = model.Synthesize(ids, a.language, a.speaker, a.max_frames);
  corpus::WriteMelFile(a.out, result.mel);
  std::cout << result.mel.frames() << " frames" << (result.truncated ? " (truncated)" : "")
            << " -> " << a.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polyloop: multilingual low-resource speech synthesis toolkit"};
  app.require_subcommand(1);

  std::string manifest, factor = "both";
  auto* weights = app.add_subcommand("weights", "Print class weights for a corpus");
  weights->add_option("--manifest", manifest, "Corpus manifest")->required();
  weights->add_option("--factor", factor, "speaker, language or both")
      ->check(CLI::IsMember({"speaker", "language", "both"}));

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Train an acoustic model");
  train->add_option("--config", train_args.config, "JSON with optional 'model' and 'plan' objects");
  train->add_option("--manifest", train_args.manifest, "Training corpus manifest")->required();
  train->add_option("--stage", train_args.stage, "pretrain, finetune or both")
      ->check(CLI::IsMember({"pretrain", "finetune", "both"}));
  train->add_option("--seed", train_args.seed, "Overrides the plan seed");
  train->add_option("--out", train_args.out, "Checkpoint to write");
  train->add_option("--init", train_args.init, "Start from this checkpoint");
  train->add_option("--log", train_args.log, "Append JSONL training records here");

  PlanArgs plan_args;
  auto* plan = app.add_subcommand("plan", "Materialize a data strategy from a pool");
  plan->add_option("--strategy", plan_args.strategy, "Strategy name");
  plan->add_option("--specs", plan_args.specs, "JSON file with custom strategies");
  plan->add_option("--pool", plan_args.pool, "Pool manifest");
  plan->add_option("--seed", plan_args.seed, "Sampling seed");
  plan->add_option("--out", plan_args.out, "Manifest to write");
  plan->add_option("--bind-speaker", plan_args.bind_speakers, "Map spec speaker to pool id: spec=pool");
  plan->add_option("--bind-language", plan_args.bind_languages, "Map spec language to pool id");
  plan->add_flag("--list", plan_args.list, "Print all known strategies");

  ServeArgs serve_args;
  auto add_experiment = [&](CLI::App* cmd) {
    cmd->add_option("--experiment", serve_args.experiment, "MUSHRA design JSON")->required();
    cmd->add_option("--store-dir", serve_args.store_dir,
                    std::string("Rating store directory (default $") + service::kStoreDirEnv + ")");
    cmd->add_option("--seed", serve_args.seed, "Panel randomization seed");
    cmd->add_option("--margin", serve_args.margin, "Anomaly margin in points");
    cmd->add_option("--alpha", serve_args.alpha, "Family-wise significance level");
  };
  auto* serve = app.add_subcommand("serve", "Run the rating service");
  add_experiment(serve);
  serve->add_option("--port", serve_args.port, "TCP port");
  serve->add_option("--host", serve_args.host, "Bind address");

  bool as_json = false;
  std::string boxplot;
  auto* analyze = app.add_subcommand("analyze", "Analyze stored ratings");
  add_experiment(analyze);
  analyze->add_flag("--json", as_json, "Emit JSON instead of text");
  analyze->add_option("--boxplot", boxplot, "Write boxplot data (TSV) here");

  SynthCorpusArgs synth_args;
  auto* synth_corpus = app.add_subcommand("synth-corpus", "Write a synthetic corpus");
  synth_corpus->add_option("--out", synth_args.out, "Output directory")->required();
  synth_corpus->add_option("--language", synth_args.languages, "code:phonemes (repeatable)");
  synth_corpus->add_option("--speaker", synth_args.speakers, "id:language:utterances (repeatable)");
  synth_corpus->add_option("--mel-bins", synth_args.mel_bins, "Mel bins");
  synth_corpus->add_option("--seed", synth_args.seed, "Generator seed");

  std::string wav, mel_out;
  std::size_t bins = 80;
  auto* features = app.add_subcommand("features", "Log-mel features from a WAV file");
  features->add_option("--wav", wav, "Input audio")->required();
  features->add_option("--out", mel_out, "Mel file to write")->required();
  features->add_option("--mel-bins", bins, "Mel bins");

  SynthesizeArgs syn;
  auto* synthesize = app.add_subcommand("synthesize", "Predict a mel spectrogram");
  synthesize->add_option("--checkpoint", syn.checkpoint)->required();
  synthesize->add_option("--phoneset", syn.phoneset, "Phoneset file of the language")->required();
  synthesize->add_option("--phonemes", syn.phonemes, "Space-separated phoneme symbols")->required();
  synthesize->add_option("--language", syn.language)->required();
  synthesize->add_option("--speaker", syn.speaker)->required();
  synthesize->add_option("--out", syn.out, "Mel file to write")->required();
  synthesize->add_option("--max-frames", syn.max_frames);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*weights) return Weights(manifest, factor);
    if (*train) return Train(train_args);
    if (*plan) return Plan(plan_args);
    if (*serve) return Serve(serve_args);
    if (*analyze) return Analyze(serve_args, as_json, boxplot);
    if (*synth_corpus) return SynthCorpus(synth_args);
    if (*features) return Features(wav, mel_out, bins);
    if (*synthesize) return Synthesize(syn);
  } catch (const strategies::InsufficientDataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
