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

#ifndef POLYLOOP_CORPUS_MANIFEST_H_
#define POLYLOOP_CORPUS_MANIFEST_H_

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "polyloop/corpus/phoneset.h"
#include "polyloop/corpus/utterance.h"

namespace polyloop::corpus {

// Manifest text format (UTF-8, one record per line, fields TAB-separated):
//
//   # comment
//   @phoneset <language> <phoneset path>
//   <id> <speaker> <language> <phoneme path> <mel path> <frames>
//
// Relative paths resolve against the manifest's directory. A phoneme file
// holds whitespace-separated symbols of the language's phoneset.
struct ManifestEntry {
  std::string id;
  std::string speaker;
  std::string language;
  std::filesystem::path phonemes;
  std::filesystem::path mel;
  std::size_t frames = 0;
};

using SpeakerLanguage = std::pair<std::string, std::string>;

struct CorpusManifest {
  std::map<std::string, std::filesystem::path> phonesets;  // by language
  std::vector<ManifestEntry> entries;

  std::map<SpeakerLanguage, std::size_t> Counts() const;
  std::map<std::string, std::size_t> SpeakerCounts() const;
  std::map<std::string, std::size_t> LanguageCounts() const;
  std::vector<std::string> Speakers() const;
  std::vector<std::string> Languages() const;
};

class DuplicateIdError : public ValidationError {
 public:
  explicit DuplicateIdError(const std::string& id)
      : ValidationError("duplicate utterance id '" + id + "'"), id_(id) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

class UnknownLanguageError : public ValidationError {
 public:
  explicit UnknownLanguageError(const std::string& language,
                                const std::string& where)
      : ValidationError(where + ": language '" + language +
                        "' has no @phoneset declaration"),
        language_(language) {}
  const std::string& language() const { return language_; }

 private:
  std::string language_;
};

struct ManifestOptions {
  bool check_files = true;
};

// Throws ParseError (with line number), DuplicateIdError,
// UnknownLanguageError, or IoError for missing referenced files.
CorpusManifest LoadManifest(const std::string& path,
                            const ManifestOptions& options = {});
CorpusManifest ParseManifest(const std::string& text,
                             const std::filesystem::path& base_dir,
                             const std::string& source_name,
                             const ManifestOptions& options = {});

// Checks id uniqueness and phoneset coverage of an in-memory manifest.
void ValidateManifest(const CorpusManifest& manifest);

void SaveManifest(const CorpusManifest& manifest, const std::string& path);

// Manifest contents loaded into memory.
struct Corpus {
  std::map<std::string, Phoneset> phonesets;
  std::vector<UtterancePtr> utterances;
  std::size_t mel_bins = 0;

  const Phoneset& phoneset(const std::string& language) const;
};

// Reads every phoneset, phoneme file and mel file. Verifies frame counts
// against the manifest and a constant mel bin count across the corpus.
Corpus LoadCorpus(const CorpusManifest& manifest);

}  // namespace polyloop::corpus

#endif  // POLYLOOP_CORPUS_MANIFEST_H_
