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

#ifndef CFH_FIXTURES_HPP
#define CFH_FIXTURES_HPP

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cfh/audio.hpp"

namespace cfh {

/// Synthetic stand-in corpus: "speech" clips spell their transcript as a
/// sequence of pure tones (one fixed frequency per character, silence for
/// spaces) over light scene noise; "noise" clips are filtered noise from one of
/// four scenes.
struct FixtureConfig {
  std::uint64_t seed = 7;
  int sample_rate = 44100;
  double clip_seconds = 2.0;
  double char_seconds = 0.1;
  double max_offset_seconds = 0.1;
  double snr_db = 20.0;
  int train_speech = 200;
  int train_noise = 200;
  int test_speech = 40;
  int test_noise = 40;
  int ood_noise = 20;
  std::string alphabet = "abcdefghijklmnopqrstuvwxyz '";
};

struct FixtureCorpus {
  std::string train_manifest;
  std::string test_manifest;
  std::string noise_test_manifest;
  std::string noise_ood_manifest;
  std::string lexicon;
};

/// (transcript, cfh_class) pairs the speech clips are drawn from.
const std::vector<std::pair<std::string, std::string>>& speech_templates();

/// Tone for a character: 300 Hz * 1.1^i for the i-th non-space alphabet
/// character; 0 for space (silence). Throws for characters outside the alphabet.
double tone_frequency(char c, const std::string& alphabet);

Waveform synthesize_speech(const std::string& transcript, const FixtureConfig& cfg, std::mt19937_64& rng);

/// `scene` is 0-based into toy_scene_names(). Out-of-domain renders use shifted
/// filter settings, and the office scene adds background tone babble.
Waveform synthesize_noise(int scene, bool out_of_domain, double gain, const FixtureConfig& cfg,
                          std::mt19937_64& rng);

/// Writes audio/, train.jsonl, test.jsonl (speech + noise), noise_test.jsonl,
/// noise_ood.jsonl and lexicon.json under out_dir.
FixtureCorpus make_fixtures(const FixtureConfig& cfg, const std::string& out_dir);

}  // namespace cfh

#endif  // CFH_FIXTURES_HPP
