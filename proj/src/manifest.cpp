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

#include "cfh/manifest.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include "cfh/audio.hpp"

namespace cfh {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::optional<std::string> optional_string(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  if (!j.at(key).is_string()) throw InvalidInput(std::string("manifest: field '") + key + "' must be a string or null");
  return j.at(key).get<std::string>();
}

json nullable(const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json to_json(const ManifestEntry& e) {
  json j{{"audio", e.audio},
         {"transcript", nullable(e.transcript)},
         {"cfh_class", nullable(e.cfh_class)},
         {"noise_scene", nullable(e.noise_scene)}};
  if (e.domain) j["domain"] = *e.domain;
  return j;
}

ManifestEntry manifest_entry_from_json(const json& j) {
  if (!j.is_object()) throw InvalidInput("manifest: entry is not an object");
  if (!j.contains("audio") || !j.at("audio").is_string()) throw InvalidInput("manifest: missing audio path");
  ManifestEntry e;
  e.audio = j.at("audio").get<std::string>();
  e.transcript = optional_string(j, "transcript");
  e.cfh_class = optional_string(j, "cfh_class");
  e.noise_scene = optional_string(j, "noise_scene");
  e.domain = optional_string(j, "domain");
  if (e.transcript.has_value() == e.noise_scene.has_value())
    throw InvalidInput("manifest: exactly one of transcript / noise_scene must be non-null");
  if (e.cfh_class && *e.cfh_class != "saveme" && *e.cfh_class != "helpme" && *e.cfh_class != "others")
    throw InvalidInput("manifest: cfh_class must be saveme, helpme, others or null");
  return e;
}

std::vector<ManifestEntry> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("read_manifest: cannot open " + path);
  const fs::path base = fs::path(path).parent_path();
  std::vector<ManifestEntry> entries;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      ManifestEntry e = manifest_entry_from_json(json::parse(line));
      if (fs::path(e.audio).is_relative()) e.audio = (base / e.audio).string();
      entries.push_back(std::move(e));
    } catch (const json::exception& ex) {
      throw InvalidInput(path + ":" + std::to_string(line_no) + ": " + ex.what());
    } catch (const InvalidInput& ex) {
      throw InvalidInput(path + ":" + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return entries;
}

void write_manifest(const std::string& path, const std::vector<ManifestEntry>& entries) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_manifest: cannot open " + path);
  for (const auto& e : entries) out << to_json(e).dump() << '\n';
}

std::vector<TrainingExample> load_examples(const std::vector<ManifestEntry>& entries, const ModelConfig& cfg) {
  const CharTokenizer tok = cfg.tokenizer();
  std::vector<TrainingExample> out;
  out.reserve(entries.size());
  for (const auto& e : entries) {
    TrainingExample ex;
    ex.mel = featurize(read_wav(e.audio), cfg.frontend).frames;
    if (e.transcript) {
      ex.noise_label = 0;
      ex.target_tokens = tok.encode(*e.transcript);
      if (static_cast<int>(ex.target_tokens->size()) + 1 > cfg.max_target_len)
        throw InvalidInput("load_examples: transcript too long for max_target_len: " + *e.transcript);
    } else {
      ex.noise_label = cfg.scene_id(*e.noise_scene);
      if (ex.noise_label < 1) throw InvalidInput("load_examples: unknown noise scene '" + *e.noise_scene + "'");
    }
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<std::string> scene_names(const std::vector<ManifestEntry>& entries) {
  std::set<std::string> names;
  for (const auto& e : entries) {
    if (e.noise_scene) names.insert(*e.noise_scene);
  }
  return {names.begin(), names.end()};
}

}  // namespace cfh
