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

#include "polyloop/corpus/manifest.h"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace polyloop::corpus {
namespace fs = std::filesystem;

namespace {

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

std::string StripCr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

fs::path Resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  if (path.is_relative()) path = base / path;
  return path.lexically_normal();
}

std::string Relativize(const fs::path& p, const fs::path& base) {
  if (base.empty()) return p.string();
  fs::path rel = p.lexically_relative(base);
  if (rel.empty()) return p.string();
  return rel.string();
}

}  // namespace

std::map<SpeakerLanguage, std::size_t> CorpusManifest::Counts() const {
  std::map<SpeakerLanguage, std::size_t> out;
  for (const auto& e : entries) ++out[{e.speaker, e.language}];
  return out;
}

std::map<std::string, std::size_t> CorpusManifest::SpeakerCounts() const {
  std::map<std::string, std::size_t> out;
  for (const auto& e : entries) ++out[e.speaker];
  return out;
}

std::map<std::string, std::size_t> CorpusManifest::LanguageCounts() const {
  std::map<std::string, std::size_t> out;
  for (const auto& e : entries) ++out[e.language];
  return out;
}

std::vector<std::string> CorpusManifest::Speakers() const {
  std::vector<std::string> out;
  for (const auto& [s, n] : SpeakerCounts()) out.push_back(s);
  return out;
}

std::vector<std::string> CorpusManifest::Languages() const {
  std::vector<std::string> out;
  for (const auto& [l, n] : LanguageCounts()) out.push_back(l);
  return out;
}

CorpusManifest ParseManifest(const std::string& text, const fs::path& base_dir,
                             const std::string& source_name,
                             const ManifestOptions& options) {
  CorpusManifest manifest;
  std::set<std::string> ids;
  std::vector<int> entry_lines;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = StripCr(raw);
    if (line.empty() || line[0] == '#') continue;
    auto fields = SplitTabs(line);
    if (fields[0] == "@phoneset") {
      if (fields.size() != 3 || fields[1].empty() || fields[2].empty()) {
        throw ParseError(source_name, line_no,
                         "expected '@phoneset<TAB>language<TAB>path'");
      }
      fs::path p = Resolve(base_dir, fields[2]);
      if (options.check_files && !fs::exists(p)) {
        throw IoError(source_name + ":" + std::to_string(line_no) +
                      ": phoneset file not found: " + p.string());
      }
      if (!manifest.phonesets.emplace(fields[1], p).second) {
        throw ParseError(source_name, line_no,
                         "phoneset for '" + fields[1] + "' declared twice");
      }
      continue;
    }
    if (fields.size() != 6) {
      throw ParseError(source_name, line_no,
                       "expected 6 TAB-separated fields, got " +
                           std::to_string(fields.size()));
    }
    for (std::size_t i = 0; i < 5; ++i) {
      if (fields[i].empty()) {
        throw ParseError(source_name, line_no,
                         "empty field " + std::to_string(i + 1));
      }
    }
    ManifestEntry e;
    e.id = fields[0];
    e.speaker = fields[1];
    e.language = fields[2];
    e.phonemes = Resolve(base_dir, fields[3]);
    e.mel = Resolve(base_dir, fields[4]);
    const std::string& fr = fields[5];
    auto [ptr, ec] = std::from_chars(fr.data(), fr.data() + fr.size(), e.frames);
    if (ec != std::errc() || ptr != fr.data() + fr.size() || e.frames == 0) {
      throw ParseError(source_name, line_no,
                       "frame count must be a positive integer, got '" + fr +
                           "'");
    }
    if (!ids.insert(e.id).second) throw DuplicateIdError(e.id);
    if (options.check_files) {
      for (const fs::path* p : {&e.phonemes, &e.mel}) {
        if (!fs::exists(*p)) {
          throw IoError(source_name + ":" + std::to_string(line_no) +
                        ": file not found: " + p->string());
        }
      }
    }
    manifest.entries.push_back(std::move(e));
    entry_lines.push_back(line_no);
  }
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    const auto& lang = manifest.entries[i].language;
    if (!manifest.phonesets.count(lang)) {
      throw UnknownLanguageError(
          lang, source_name + ":" + std::to_string(entry_lines[i]));
    }
  }
  return manifest;
}

CorpusManifest LoadManifest(const std::string& path,
                            const ManifestOptions& options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseManifest(buf.str(), fs::path(path).parent_path(), path, options);
}

void ValidateManifest(const CorpusManifest& manifest) {
  std::set<std::string> ids;
  for (const auto& e : manifest.entries) {
    if (!ids.insert(e.id).second) throw DuplicateIdError(e.id);
    if (!manifest.phonesets.count(e.language)) {
      throw UnknownLanguageError(e.language, "entry " + e.id);
    }
  }
}

void SaveManifest(const CorpusManifest& manifest, const std::string& path) {
  ValidateManifest(manifest);
  const fs::path base = fs::absolute(fs::path(path)).parent_path();
  auto rel = [&](const fs::path& p) {
    return Relativize(p.is_absolute() ? p : fs::absolute(p), base);
  };
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write manifest " + path);
  out << "# polyloop corpus manifest\n";
  for (const auto& [lang, p] : manifest.phonesets) {
    out << "@phoneset\t" << lang << '\t' << rel(p) << '\n';
  }
  for (const auto& e : manifest.entries) {
    out << e.id << '\t' << e.speaker << '\t' << e.language << '\t'
        << rel(e.phonemes) << '\t' << rel(e.mel) << '\t' << e.frames << '\n';
  }
  if (!out) throw IoError("failed writing manifest " + path);
}

const Phoneset& Corpus::phoneset(const std::string& language) const {
  auto it = phonesets.find(language);
  if (it == phonesets.end()) {
    throw UnknownLanguageError(language, "corpus");
  }
  return it->second;
}

Corpus LoadCorpus(const CorpusManifest& manifest) {
  ValidateManifest(manifest);
  Corpus corpus;
  for (const auto& [lang, path] : manifest.phonesets) {
    corpus.phonesets.emplace(lang, Phoneset::Load(lang, path.string()));
  }
  for (const auto& e : manifest.entries) {
    std::ifstream pin(e.phonemes);
    if (!pin) throw IoError("cannot open phoneme file " + e.phonemes.string());
    std::vector<std::string> symbols;
    for (std::string s; pin >> s;) symbols.push_back(s);
    auto u = std::make_shared<Utterance>();
    u->id = e.id;
    u->speaker = e.speaker;
    u->language = e.language;
    try {
      u->phonemes = corpus.phoneset(e.language).Encode(symbols);
    } catch (const UnknownSymbolError& err) {
      throw ValidationError(e.phonemes.string() + ": " + err.what());
    }
    if (u->phonemes.empty()) {
      throw ValidationError(e.phonemes.string() + ": no phonemes");
    }
    u->mel = ReadMelFile(e.mel.string());
    if (u->mel.frames() != e.frames) {
      throw ValidationError(e.mel.string() + ": has " +
                            std::to_string(u->mel.frames()) +
                            " frames, manifest says " +
                            std::to_string(e.frames));
    }
    if (corpus.mel_bins == 0) corpus.mel_bins = u->mel.bins();
    if (u->mel.bins() != corpus.mel_bins) {
      throw ValidationError(e.mel.string() + ": has " +
                            std::to_string(u->mel.bins()) +
                            " mel bins, corpus uses " +
                            std::to_string(corpus.mel_bins));
    }
    corpus.utterances.push_back(std::move(u));
  }
  return corpus;
}

}  // namespace polyloop::corpus
