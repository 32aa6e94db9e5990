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

#include "polyloop/corpus/synthetic.h"

#include <cmath>
#include <fstream>
#include <map>

#include "polyloop/common/random.h"

namespace polyloop::corpus {
namespace fs = std::filesystem;

namespace {

struct PhonemeModel {
  std::vector<float> envelope;  // mel_bins
  std::size_t duration;
};

struct SpeakerModel {
  float offset;
  float tilt;
};

constexpr float kFloorLevel = -7.0f;

std::vector<PhonemeModel> BuildPhonemes(const SyntheticLanguage& lang,
                                        const SyntheticCorpusConfig& cfg) {
  Rng rng(MixSeed(cfg.seed, "phonemes/" + lang.code));
  std::vector<PhonemeModel> out;
  const double bins = static_cast<double>(cfg.mel_bins);
  for (std::size_t k = 0; k < lang.phonemes; ++k) {
    PhonemeModel m;
    m.duration = static_cast<std::size_t>(rng.IntInRange(
        static_cast<int>(cfg.min_duration), static_cast<int>(cfg.max_duration)));
    const double c1 = rng.Uniform(0.05, 0.45) * bins;
    const double c2 = rng.Uniform(0.45, 0.9) * bins;
    const double w1 = rng.Uniform(0.04, 0.12) * bins;
    const double w2 = rng.Uniform(0.04, 0.12) * bins;
    const double a1 = rng.Uniform(3.0, 6.0);
    const double a2 = rng.Uniform(1.0, 4.0);
    m.envelope.resize(cfg.mel_bins);
    for (std::size_t b = 0; b < cfg.mel_bins; ++b) {
      const double x = static_cast<double>(b);
      m.envelope[b] = static_cast<float>(
          kFloorLevel + a1 * std::exp(-std::pow((x - c1) / w1, 2.0)) +
          a2 * std::exp(-std::pow((x - c2) / w2, 2.0)));
    }
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace

Corpus GenerateSyntheticCorpus(const SyntheticCorpusConfig& cfg) {
  if (cfg.mel_bins == 0 || cfg.min_phonemes == 0 ||
      cfg.min_phonemes > cfg.max_phonemes || cfg.min_duration == 0 ||
      cfg.min_duration > cfg.max_duration) {
    throw ValidationError("invalid synthetic corpus configuration");
  }
  Corpus corpus;
  corpus.mel_bins = cfg.mel_bins;
  std::map<std::string, std::vector<PhonemeModel>> models;
  for (const auto& lang : cfg.languages) {
    if (lang.phonemes == 0) {
      throw ValidationError("language " + lang.code + " has no phonemes");
    }
    std::vector<std::string> symbols;
    for (std::size_t k = 0; k < lang.phonemes; ++k) {
      symbols.push_back(lang.code + "_" + std::to_string(k));
    }
    corpus.phonesets.emplace(lang.code, Phoneset(lang.code, symbols));
    models.emplace(lang.code, BuildPhonemes(lang, cfg));
  }
  for (const auto& spk : cfg.speakers) {
    auto it = models.find(spk.language);
    if (it == models.end()) {
      throw ValidationError("speaker " + spk.id + " uses undeclared language " +
                            spk.language);
    }
    const auto& phonemes = it->second;
    Rng srng(MixSeed(cfg.seed, "speaker/" + spk.id));
    const SpeakerModel voice{static_cast<float>(srng.Uniform(-0.8, 0.8)),
                             static_cast<float>(srng.Uniform(-0.02, 0.02))};
    for (std::size_t n = 0; n < spk.utterances; ++n) {
      auto u = std::make_shared<Utterance>();
      u->id = spk.id + "_" + spk.language + "_" + std::to_string(n);
      u->speaker = spk.id;
      u->language = spk.language;
      const std::size_t len = static_cast<std::size_t>(
          srng.IntInRange(static_cast<int>(cfg.min_phonemes),
                          static_cast<int>(cfg.max_phonemes)));
      for (std::size_t i = 0; i < len; ++i) {
        u->phonemes.push_back(
            static_cast<int>(srng.Below(phonemes.size())));
      }
      std::size_t frames = 0;
      for (int p : u->phonemes) frames += phonemes[p].duration;
      MelSpectrogram mel(frames, cfg.mel_bins);
      std::size_t f = 0;
      const float centre = static_cast<float>(cfg.mel_bins) / 2.0f;
      for (std::size_t i = 0; i < len; ++i) {
        const auto& cur = phonemes[u->phonemes[i]];
        const auto* prev = i > 0 ? &phonemes[u->phonemes[i - 1]] : nullptr;
        for (std::size_t d = 0; d < cur.duration; ++d, ++f) {
          for (std::size_t b = 0; b < cfg.mel_bins; ++b) {
            float v = cur.envelope[b];
            // One-frame crossfade at phoneme onsets.
            if (d == 0 && prev) v = 0.5f * (v + prev->envelope[b]);
            v += voice.offset + voice.tilt * (static_cast<float>(b) - centre);
            mel.at(f, b) = v;
          }
        }
      }
      u->mel = std::move(mel);
      corpus.utterances.push_back(std::move(u));
    }
  }
  return corpus;
}

CorpusManifest WriteCorpus(const Corpus& corpus, const fs::path& dir) {
  fs::create_directories(dir / "phonesets");
  fs::create_directories(dir / "phonemes");
  fs::create_directories(dir / "mel");
  CorpusManifest manifest;
  for (const auto& [lang, ps] : corpus.phonesets) {
    const fs::path p = dir / "phonesets" / (lang + ".txt");
    ps.Save(p.string());
    manifest.phonesets[lang] = fs::absolute(p);
  }
  for (const auto& u : corpus.utterances) {
    const fs::path ph = dir / "phonemes" / (u->id + ".txt");
    {
      std::ofstream out(ph, std::ios::trunc);
      if (!out) throw IoError("cannot write " + ph.string());
      const auto symbols = corpus.phoneset(u->language).Decode(u->phonemes);
      for (std::size_t i = 0; i < symbols.size(); ++i) {
        out << (i ? " " : "") << symbols[i];
      }
      out << '\n';
    }
    const fs::path mel = dir / "mel" / (u->id + ".mel");
    WriteMelFile(mel.string(), u->mel);
    manifest.entries.push_back({u->id, u->speaker, u->language,
                                fs::absolute(ph), fs::absolute(mel),
                                u->frames()});
  }
  SaveManifest(manifest, (dir / "manifest.tsv").string());
  return manifest;
}

}  // namespace polyloop::corpus
