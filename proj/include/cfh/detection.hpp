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

#ifndef CFH_DETECTION_HPP
#define CFH_DETECTION_HPP

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "cfh/audio.hpp"
#include "cfh/manifest.hpp"
#include "cfh/model.hpp"

namespace cfh {

enum class CfhClass { kSaveMe, kHelpMe, kOthers, kNoise };

std::string_view to_string(CfhClass c);
CfhClass cfh_class_from_string(std::string_view s);

struct GateDecision {
  bool speech = false;
  double speech_posterior = 0.0;
  /// Most likely noise scene, a class id in 1..K.
  int scene_argmax = 1;
};

/// speech_posterior = softmax(logits)[0]; speech iff posterior >= tau.
/// tau = 0 passes everything through.
GateDecision gate(const Eigen::VectorXd& noise_logits, double tau);

/// Lowercases ASCII, drops ASCII punctuation, collapses whitespace runs to a
/// single space and trims. Non-ASCII bytes pass through untouched.
std::string normalize_transcript(std::string_view text);

/// Emergency phrase patterns per class. Patterns are stored normalized.
struct KeywordLexicon {
  std::vector<std::string> saveme;
  std::vector<std::string> helpme;

  static KeywordLexicon from_json(const nlohmann::json& j);
  static KeywordLexicon load(const std::string& path);
  /// {"saveme": ["save me"], "helpme": ["help me"]}
  static KeywordLexicon english_default();
  nlohmann::json to_json() const;
};

/// First class (saveme, then helpme) with a pattern that is a substring of
/// the normalized transcript; otherwise others.
CfhClass classify_transcript(std::string_view transcript, const KeywordLexicon& lexicon);

struct DetectionEvent {
  CfhClass klass = CfhClass::kOthers;
  std::string transcript;
  double speech_posterior = 0.0;
  bool decoder_invoked = false;
  int scene_argmax = 0;
  std::optional<std::string> error;
};

nlohmann::json to_json(const DetectionEvent& e);
DetectionEvent detection_event_from_json(const nlohmann::json& j);

/// What the pipeline needs from an acoustic model. Encoder states are passed
/// back in so the noise head and the decoder share one encoder pass.
class SpeechModel {
 public:
  virtual ~SpeechModel() = default;
  virtual const FrontendConfig& frontend() const = 0;
  virtual Eigen::MatrixXf encode(const MelSpectrogram& mel) const = 0;
  /// K + 1 logits, index 0 = speech.
  virtual Eigen::VectorXd noise_logits(const Eigen::MatrixXf& states) const = 0;
  virtual std::string transcribe(const Eigen::MatrixXf& states) const = 0;
  virtual const std::vector<std::string>& scene_names() const = 0;
};

/// SpeechModel backed by the encoder-decoder transformer.
class TransformerSpeechModel : public SpeechModel {
 public:
  explicit TransformerSpeechModel(std::shared_ptr<const ModelParameters<float>> params);

  const FrontendConfig& frontend() const override { return params_->config.frontend; }
  Eigen::MatrixXf encode(const MelSpectrogram& mel) const override;
  Eigen::VectorXd noise_logits(const Eigen::MatrixXf& states) const override;
  std::string transcribe(const Eigen::MatrixXf& states) const override;
  const std::vector<std::string>& scene_names() const override { return params_->config.noise_scenes; }

  const ModelParameters<float>& parameters() const { return *params_; }

 private:
  std::shared_ptr<const ModelParameters<float>> params_;
};

/// Gate, then decode and classify only when the gate passes.
DetectionEvent detect_features(const MelSpectrogram& mel, const SpeechModel& model,
                               const KeywordLexicon& lexicon, double tau);

/// resample -> pad_or_trim -> log_mel -> detect_features.
DetectionEvent detect(const Waveform& w, const SpeechModel& model, const KeywordLexicon& lexicon, double tau);

struct BatchDetection {
  std::vector<DetectionEvent> events;
  long decoder_invocations = 0;
  long errors = 0;
};

/// Runs detect over each manifest entry in order. Unreadable audio produces an
/// event with `error` set; the run continues.
BatchDetection detect_batch(const std::vector<ManifestEntry>& entries, const SpeechModel& model,
                            const KeywordLexicon& lexicon, double tau);

}  // namespace cfh

#endif  // CFH_DETECTION_HPP
