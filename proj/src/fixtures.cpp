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

#include "cfh/fixtures.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "cfh/detection.hpp"
#include "cfh/manifest.hpp"
#include "cfh/model_config.hpp"

namespace cfh {

namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kRampSeconds = 0.01;

void lowpass(Eigen::VectorXd& x, double cutoff, int rate) {
  const double a = 1.0 - std::exp(-kTwoPi * cutoff / rate);
  double y = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    y += a * (x[i] - y);
    x[i] = y;
  }
}

void highpass(Eigen::VectorXd& x, double cutoff, int rate) {
  Eigen::VectorXd low = x;
  lowpass(low, cutoff, rate);
  x -= low;
}

void normalize_rms(Eigen::VectorXd& x) {
  const double rms = std::sqrt(x.squaredNorm() / static_cast<double>(x.size()));
  if (rms > 0.0) x /= rms;
}

Eigen::VectorXd white(long n, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::VectorXd x(n);
  for (long i = 0; i < n; ++i) x[i] = dist(rng);
  return x;
}

// Adds a tone with raised-cosine on/off ramps over [start, start + len).
void add_tone(Eigen::VectorXd& x, long start, long len, double freq, double amp, int rate) {
  const long ramp = std::max(1L, std::lround(kRampSeconds * rate));
  for (long i = 0; i < len && start + i < x.size(); ++i) {
    if (start + i < 0) continue;
    double env = 1.0;
    if (i < ramp) env = 0.5 - 0.5 * std::cos(std::numbers::pi * i / ramp);
    if (len - 1 - i < ramp) env = std::min(env, 0.5 - 0.5 * std::cos(std::numbers::pi * (len - 1 - i) / ramp));
    x[start + i] += amp * env * std::sin(kTwoPi * freq * i / rate);
  }
}

std::string clip_name(const std::string& prefix, int i) {
  std::ostringstream name;
  name << prefix << '_' << std::setw(4) << std::setfill('0') << i << ".wav";
  return name.str();
}

}  // namespace

const std::vector<std::pair<std::string, std::string>>& speech_templates() {
  static const std::vector<std::pair<std::string, std::string>> templates = {
      {"save me", "saveme"},        {"please save me", "saveme"}, {"save me now", "saveme"},
      {"help me", "helpme"},        {"somebody help me", "helpme"}, {"help me please", "helpme"},
      {"good morning", "others"},   {"see you later", "others"},  {"open the door", "others"},
      {"call mom", "others"},       {"help desk", "others"},      {"save the file", "others"},
  };
  return templates;
}

double tone_frequency(char c, const std::string& alphabet) {
  if (c == ' ') return 0.0;
  int index = 0;
  for (const char a : alphabet) {
    if (a == ' ') continue;
    if (a == c) return 300.0 * std::pow(1.1, index);
    ++index;
  }
  throw InvalidInput(std::string("tone_frequency: character not in alphabet: ") + c);
}

Waveform synthesize_speech(const std::string& transcript, const FixtureConfig& cfg, std::mt19937_64& rng) {
  const long n = std::lround(cfg.clip_seconds * cfg.sample_rate);
  const long char_len = std::lround(cfg.char_seconds * cfg.sample_rate);
  std::uniform_real_distribution<double> offset_dist(0.0, cfg.max_offset_seconds);
  std::uniform_real_distribution<double> detune(-0.01, 0.01);
  std::uniform_real_distribution<double> amp_dist(0.3, 0.6);
  std::uniform_int_distribution<int> scene_dist(0, static_cast<int>(toy_scene_names().size()) - 1);

  const long offset = std::lround(offset_dist(rng) * cfg.sample_rate);
  Eigen::VectorXd voice = Eigen::VectorXd::Zero(n);
  long voiced = 0;
  for (std::size_t k = 0; k < transcript.size(); ++k) {
    const double f = tone_frequency(transcript[k], cfg.alphabet);
    const double amp = amp_dist(rng);
    const double jitter = detune(rng);
    if (f == 0.0) continue;
    add_tone(voice, offset + static_cast<long>(k) * char_len, char_len, f * (1.0 + jitter), amp, cfg.sample_rate);
    voiced += char_len;
  }
  const double voice_rms = voiced > 0 ? std::sqrt(voice.squaredNorm() / static_cast<double>(voiced)) : 0.1;
  const double noise_gain = voice_rms / std::pow(10.0, cfg.snr_db / 20.0);
  const Waveform bg = synthesize_noise(scene_dist(rng), false, noise_gain, cfg, rng);

  Waveform w;
  w.sample_rate = cfg.sample_rate;
  w.samples = (voice + bg.samples.cast<double>()).cwiseMax(-1.0).cwiseMin(1.0).cast<float>();
  return w;
}

Waveform synthesize_noise(int scene, bool out_of_domain, double gain, const FixtureConfig& cfg,
                          std::mt19937_64& rng) {
  const int rate = cfg.sample_rate;
  const long n = std::lround(cfg.clip_seconds * rate);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd x;
  switch (scene) {
    case 0: {  // traffic: low rumble with slow swell
      x = white(n, rng);
      const double fc = out_of_domain ? 400.0 : 150.0;
      lowpass(x, fc, rate);
      lowpass(x, fc, rate);
      normalize_rms(x);
      const double phase = kTwoPi * unit(rng);
      for (long i = 0; i < n; ++i) x[i] *= 1.0 + 0.5 * std::sin(kTwoPi * 0.5 * i / rate + phase);
      break;
    }
    case 1: {  // office: soft broadband bed plus keyboard clicks
      x = white(n, rng);
      lowpass(x, out_of_domain ? 1500.0 : 800.0, rate);
      normalize_rms(x);
      x *= 0.5;
      Eigen::VectorXd clicks = Eigen::VectorXd::Zero(n);
      std::exponential_distribution<double> gap(1.0 / 0.15);
      const long click_len = std::lround(0.005 * rate);
      for (double t = gap(rng); t < cfg.clip_seconds; t += gap(rng)) {
        const long start = std::lround(t * rate);
        Eigen::VectorXd burst = white(click_len, rng);
        highpass(burst, 3000.0, rate);
        for (long i = 0; i < click_len && start + i < n; ++i) clicks[start + i] += 3.0 * burst[i];
      }
      x += clicks;
      if (out_of_domain) {
        // Background talkers: random alphabet tones.
        std::uniform_int_distribution<std::size_t> pick(0, cfg.alphabet.size() - 1);
        const long seg = std::lround(cfg.char_seconds * rate);
        for (long start = 0; start < n; start += seg) {
          const double f = tone_frequency(cfg.alphabet[pick(rng)], cfg.alphabet);
          if (f > 0.0) add_tone(x, start, seg, f, 0.8, rate);
        }
      }
      break;
    }
    case 2: {  // restroom: running water, band-limited hiss
      x = white(n, rng);
      highpass(x, out_of_domain ? 1000.0 : 2000.0, rate);
      lowpass(x, out_of_domain ? 3000.0 : 5000.0, rate);
      break;
    }
    case 3: {  // machine: harmonic hum
      const double f0 = out_of_domain ? 200.0 + 60.0 * unit(rng) : 90.0 + 50.0 * unit(rng);
      x = 0.1 * white(n, rng);
      for (int h = 1; h <= 6; ++h) {
        const double phase = kTwoPi * unit(rng);
        for (long i = 0; i < n; ++i) x[i] += std::sin(kTwoPi * h * f0 * i / rate + phase) / h;
      }
      break;
    }
    default:
      throw InvalidInput("synthesize_noise: unknown scene " + std::to_string(scene));
  }
  normalize_rms(x);
  Waveform w;
  w.sample_rate = rate;
  w.samples = (gain * x).cwiseMax(-1.0).cwiseMin(1.0).cast<float>();
  return w;
}

FixtureCorpus make_fixtures(const FixtureConfig& cfg, const std::string& out_dir) {
  const fs::path root(out_dir);
  fs::create_directories(root / "audio");
  std::mt19937_64 rng(cfg.seed);
  const auto& templates = speech_templates();
  const auto& scenes = toy_scene_names();
  std::uniform_int_distribution<std::size_t> pick_template(0, templates.size() - 1);
  std::uniform_real_distribution<double> noise_gain(0.05, 0.25);

  auto speech = [&](const std::string& prefix, int count) {
    std::vector<ManifestEntry> entries;
    for (int i = 0; i < count; ++i) {
      const auto& [text, klass] = templates[pick_template(rng)];
      const std::string name = clip_name(prefix, i);
      write_wav((root / "audio" / name).string(), synthesize_speech(text, cfg, rng));
      entries.push_back({"audio/" + name, text, klass, std::nullopt, std::nullopt});
    }
    return entries;
  };
  auto noise = [&](const std::string& prefix, int count, bool ood) {
    std::vector<ManifestEntry> entries;
    for (int i = 0; i < count; ++i) {
      const int scene = i % static_cast<int>(scenes.size());
      const std::string name = clip_name(prefix, i);
      write_wav((root / "audio" / name).string(), synthesize_noise(scene, ood, noise_gain(rng), cfg, rng));
      entries.push_back({"audio/" + name, std::nullopt, std::nullopt, scenes[static_cast<std::size_t>(scene)],
                         std::string(ood ? "out-of-domain" : "in-domain")});
    }
    return entries;
  };

  std::vector<ManifestEntry> train = speech("train_speech", cfg.train_speech);
  const std::vector<ManifestEntry> train_noise = noise("train_noise", cfg.train_noise, false);
  train.insert(train.end(), train_noise.begin(), train_noise.end());
  std::vector<ManifestEntry> test = speech("test_speech", cfg.test_speech);
  const std::vector<ManifestEntry> test_noise = noise("test_noise", cfg.test_noise, false);
  test.insert(test.end(), test_noise.begin(), test_noise.end());
  const std::vector<ManifestEntry> ood = noise("ood_noise", cfg.ood_noise, true);

  FixtureCorpus corpus;
  corpus.train_manifest = (root / "train.jsonl").string();
  corpus.test_manifest = (root / "test.jsonl").string();
  corpus.noise_test_manifest = (root / "noise_test.jsonl").string();
  corpus.noise_ood_manifest = (root / "noise_ood.jsonl").string();
  corpus.lexicon = (root / "lexicon.json").string();
  write_manifest(corpus.train_manifest, train);
  write_manifest(corpus.test_manifest, test);
  write_manifest(corpus.noise_test_manifest, test_noise);
  write_manifest(corpus.noise_ood_manifest, ood);
  std::ofstream(corpus.lexicon) << KeywordLexicon::english_default().to_json().dump(2) << '\n';
  return corpus;
}

}  // namespace cfh
