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

#include <cmath>
#include <fstream>
#include <iterator>
#include <set>

#include "doctest.h"

#include "cfh/detection.hpp"
#include "cfh/fixtures.hpp"
#include "cfh/manifest.hpp"
#include "test_util.hpp"

using namespace cfh;
using cfh::testing::dft_magnitude;
using cfh::testing::temp_dir;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

FixtureConfig small_corpus(std::uint64_t seed) {
  FixtureConfig cfg;
  cfg.seed = seed;
  cfg.train_speech = 6;
  cfg.train_noise = 5;
  cfg.test_speech = 3;
  cfg.test_noise = 4;
  cfg.ood_noise = 4;
  return cfg;
}

// Frequency of the strongest DFT bin between lo and hi Hz.
double peak_frequency(const Eigen::VectorXf& x, int rate, double lo, double hi) {
  const double bin_hz = static_cast<double>(rate) / static_cast<double>(x.size());
  double best = -1.0, best_f = 0.0;
  for (long k = std::lround(lo / bin_hz); k <= std::lround(hi / bin_hz); ++k) {
    const double m = dft_magnitude(x, k);
    if (m > best) {
      best = m;
      best_f = static_cast<double>(k) * bin_hz;
    }
  }
  return best_f;
}

// Share of spectral magnitude below `split` Hz, on a 40 Hz grid up to 8 kHz.
double low_share(const Eigen::VectorXf& x, int rate, double split) {
  const double bin_hz = static_cast<double>(rate) / static_cast<double>(x.size());
  double low = 0.0, all = 0.0;
  for (double f = 20.0; f < 8000.0; f += 40.0) {
    const double m = dft_magnitude(x, std::lround(f / bin_hz));
    all += m * m;
    if (f < split) low += m * m;
  }
  return low / all;
}

}  // namespace

TEST_SUITE("fixtures") {

TEST_CASE("tone table") {
  const std::string alphabet = "abcdefghijklmnopqrstuvwxyz '";
  CHECK(tone_frequency('a', alphabet) == 300.0);
  CHECK(std::abs(tone_frequency('c', alphabet) - 363.0) < 1e-9);
  CHECK(std::abs(tone_frequency('\'', alphabet) - 300.0 * std::pow(1.1, 26)) < 1e-9);
  CHECK(tone_frequency(' ', alphabet) == 0.0);
  CHECK_THROWS_AS(tone_frequency('A', alphabet), InvalidInput);
  std::set<double> seen;
  for (const char c : alphabet) seen.insert(tone_frequency(c, alphabet));
  CHECK(seen.size() == alphabet.size());
}

TEST_CASE("templates use the lexicon classes") {
  const KeywordLexicon lex = KeywordLexicon::english_default();
  std::set<std::string> classes;
  for (const auto& [text, klass] : speech_templates()) {
    classes.insert(klass);
    CHECK(to_string(classify_transcript(text, lex)) == klass);
  }
  CHECK(classes == std::set<std::string>{"saveme", "helpme", "others"});
}

TEST_CASE("speech clips spell their transcript in tones") {
  FixtureConfig cfg;
  cfg.max_offset_seconds = 0.0;
  cfg.snr_db = 120.0;
  std::mt19937_64 rng(3);
  const std::string text = "help me";
  const Waveform w = synthesize_speech(text, cfg, rng);
  CHECK(w.sample_rate == 44100);
  CHECK(w.samples.size() == 88200);
  const long char_len = std::lround(cfg.char_seconds * cfg.sample_rate);
  for (std::size_t k = 0; k < text.size(); ++k) {
    const Eigen::VectorXf seg = w.samples.segment(static_cast<Eigen::Index>(k) * char_len, char_len);
    const double f = tone_frequency(text[k], cfg.alphabet);
    if (f == 0.0) {
      CHECK(seg.cwiseAbs().maxCoeff() < 1e-3f);
      continue;
    }
    const double peak = peak_frequency(seg, cfg.sample_rate, 200.0, 4000.0);
    CAPTURE(text[k]);
    CHECK(std::abs(peak - f) <= 0.01 * f + 10.0);
  }
  const Eigen::VectorXf tail = w.samples.tail(w.samples.size() - static_cast<Eigen::Index>(text.size()) * char_len);
  CHECK(tail.cwiseAbs().maxCoeff() < 1e-3f);
}

TEST_CASE("noise clips are normalized to their gain") {
  FixtureConfig cfg;
  cfg.clip_seconds = 0.25;
  std::mt19937_64 rng(9);
  for (int scene = 0; scene < 4; ++scene) {
    for (const bool ood : {false, true}) {
      // Small gain: office clicks would otherwise clip at full scale.
      const Waveform w = synthesize_noise(scene, ood, 0.01, cfg, rng);
      CHECK(w.samples.size() == 11025);
      CHECK(w.samples.cwiseAbs().maxCoeff() < 1.0f);
      const double rms = std::sqrt(w.samples.cast<double>().squaredNorm() / 11025.0);
      CAPTURE(scene);
      CHECK(std::abs(rms - 0.01) < 1e-7);
    }
  }
  CHECK_THROWS_AS(synthesize_noise(4, false, 0.1, cfg, rng), InvalidInput);
}

TEST_CASE("noise scenes differ in spectrum and shift out of domain") {
  FixtureConfig cfg;
  cfg.clip_seconds = 0.25;
  std::mt19937_64 rng(10);
  const double traffic = low_share(synthesize_noise(0, false, 0.1, cfg, rng).samples, cfg.sample_rate, 500.0);
  const double restroom = low_share(synthesize_noise(2, false, 0.1, cfg, rng).samples, cfg.sample_rate, 500.0);
  const double traffic_ood = low_share(synthesize_noise(0, true, 0.1, cfg, rng).samples, cfg.sample_rate, 200.0);
  const double traffic_in = low_share(synthesize_noise(0, false, 0.1, cfg, rng).samples, cfg.sample_rate, 200.0);
  CHECK(traffic > 0.9);
  CHECK(restroom < 0.05);
  CHECK(traffic_ood < traffic_in);
}

TEST_CASE("make_fixtures writes valid, reproducible manifests") {
  const auto a = temp_dir("fixtures_a");
  const auto b = temp_dir("fixtures_b");
  const FixtureConfig cfg = small_corpus(7);
  const FixtureCorpus ca = make_fixtures(cfg, a.string());
  make_fixtures(cfg, b.string());

  const auto train = read_manifest(ca.train_manifest);
  const auto test = read_manifest(ca.test_manifest);
  const auto noise_test = read_manifest(ca.noise_test_manifest);
  const auto ood = read_manifest(ca.noise_ood_manifest);
  CHECK(train.size() == 11);
  CHECK(test.size() == 7);
  CHECK(noise_test.size() == 4);
  CHECK(ood.size() == 4);
  std::set<std::string> scenes;
  for (const auto& e : ood) {
    CHECK(e.domain == std::optional<std::string>("out-of-domain"));
    scenes.insert(*e.noise_scene);
  }
  CHECK(scenes.size() == 4);
  for (const auto& e : train) {
    const Waveform w = read_wav(e.audio);
    CHECK(w.sample_rate == 44100);
    CHECK(w.samples.size() == 88200);
    if (e.is_speech()) {
      CHECK(e.cfh_class.has_value());
    } else {
      CHECK(std::find(toy_scene_names().begin(), toy_scene_names().end(), *e.noise_scene) !=
            toy_scene_names().end());
    }
  }
  CHECK_NOTHROW(KeywordLexicon::load(ca.lexicon));

  long files = 0;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = std::filesystem::relative(entry.path(), a);
    CAPTURE(rel.string());
    CHECK(slurp(entry.path()) == slurp(b / rel));
    ++files;
  }
  CHECK(files == 5 + 11 + 7 + 4);

  const auto c = temp_dir("fixtures_c");
  make_fixtures(small_corpus(8), c.string());
  CHECK(slurp(a / "train.jsonl") != slurp(c / "train.jsonl"));
}

}  // TEST_SUITE
