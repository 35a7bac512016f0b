// Copyright 2026 The cfh Authors. All Rights Reserved.
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

#ifndef CFH_MANIFEST_HPP
#define CFH_MANIFEST_HPP

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cfh/losses.hpp"
#include "cfh/model_config.hpp"

namespace cfh {

/// One line of a JSON Lines manifest. Exactly one of transcript / noise_scene
/// is set. `domain` tags noise-scene reports ("in-domain", "out-of-domain").
struct ManifestEntry {
  std::string audio;
  std::optional<std::string> transcript;
  std::optional<std::string> cfh_class;
  std::optional<std::string> noise_scene;
  std::optional<std::string> domain;

  bool is_speech() const { return transcript.has_value(); }
};

nlohmann::json to_json(const ManifestEntry& e);
/// Validates the schema; throws InvalidInput on violations.
ManifestEntry manifest_entry_from_json(const nlohmann::json& j);

/// Reads a manifest; relative audio paths are resolved against the manifest's
/// directory.
std::vector<ManifestEntry> read_manifest(const std::string& path);
void write_manifest(const std::string& path, const std::vector<ManifestEntry>& entries);

/// Featurizes every entry for training. Noise scenes map to class ids via the
/// config; transcripts are tokenized with its alphabet.
std::vector<TrainingExample> load_examples(const std::vector<ManifestEntry>& entries, const ModelConfig& cfg);

/// Sorted unique noise scene names appearing in the entries.
std::vector<std::string> scene_names(const std::vector<ManifestEntry>& entries);

}  // namespace cfh

#endif  // CFH_MANIFEST_HPP
