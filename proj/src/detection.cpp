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

#include "cfh/detection.hpp"

#include <cmath>
#include <fstream>

#include "cfh/transformer.hpp"

namespace cfh {

using nlohmann::json;

std::string_view to_string(CfhClass c) {
  switch (c) {
    case CfhClass::kSaveMe: return "saveme";
    case CfhClass::kHelpMe: return "helpme";
    case CfhClass::kOthers: return "others";
    case CfhClass::kNoise: return "noise";
  }
  return "others";
}

CfhClass cfh_class_from_string(std::string_view s) {
  if (s == "saveme") return CfhClass::kSaveMe;
  if (s == "helpme") return CfhClass::kHelpMe;
  if (s == "others") return CfhClass::kOthers;
  if (s == "noise") return CfhClass::kNoise;
  throw InvalidInput("unknown call-for-help class: " + std::string(s));
}

GateDecision gate(const Eigen::VectorXd& noise_logits, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw InvalidInput("gate: tau must lie in [0, 1]");
  if (noise_logits.size() < 2) throw InvalidInput("gate: need at least one speech and one noise logit");
  const double mx = noise_logits.maxCoeff();
  const Eigen::VectorXd e = (noise_logits.array() - mx).exp();
  GateDecision d;
  d.speech_posterior = e[0] / e.sum();
  d.speech = d.speech_posterior >= tau;
  Eigen::Index best = 0;
  noise_logits.tail(noise_logits.size() - 1).maxCoeff(&best);
  d.scene_argmax = static_cast<int>(best) + 1;
  return d;
}

std::string normalize_transcript(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (const char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c < 128 && std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (c < 128 && std::ispunct(c)) continue;
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(c < 128 ? static_cast<char>(std::tolower(c)) : ch);
  }
  return out;
}

KeywordLexicon KeywordLexicon::from_json(const json& j) {
  KeywordLexicon lex;
  auto read = [&](const char* key, std::vector<std::string>& dst) {
    if (!j.contains(key) || !j.at(key).is_array()) throw InvalidInput(std::string("lexicon: missing list '") + key + "'");
    for (const auto& p : j.at(key)) {
      const std::string norm = normalize_transcript(p.get<std::string>());
      if (!norm.empty()) dst.push_back(norm);
    }
    if (dst.empty()) throw InvalidInput(std::string("lexicon: no usable patterns for '") + key + "'");
  };
  read("saveme", lex.saveme);
  read("helpme", lex.helpme);
  return lex;
}

KeywordLexicon KeywordLexicon::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("lexicon: cannot open " + path);
  try {
    return from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw InvalidInput("lexicon: " + path + ": " + e.what());
  }
}

KeywordLexicon KeywordLexicon::english_default() { return {{"save me"}, {"help me"}}; }

json KeywordLexicon::to_json() const { return json{{"saveme", saveme}, {"helpme", helpme}}; }

CfhClass classify_transcript(std::string_view transcript, const KeywordLexicon& lexicon) {
  const std::string text = normalize_transcript(transcript);
  auto matches = [&](const std::vector<std::string>& patterns) {
    for (const auto& p : patterns) {
      if (text.find(p) != std::string::npos) return true;
    }
    return false;
  };
  if (matches(lexicon.saveme)) return CfhClass::kSaveMe;
  if (matches(lexicon.helpme)) return CfhClass::kHelpMe;
  return CfhClass::kOthers;
}

json to_json(const DetectionEvent& e) {
  json j{{"klass", to_string(e.klass)},
         {"transcript", e.transcript},
         {"speech_posterior", e.speech_posterior},
         {"decoder_invoked", e.decoder_invoked}};
  if (e.error) j["error"] = *e.error;
  return j;
}

DetectionEvent detection_event_from_json(const json& j) {
  DetectionEvent e;
  e.klass = cfh_class_from_string(j.at("klass").get<std::string>());
  e.transcript = j.at("transcript").get<std::string>();
  e.speech_posterior = j.at("speech_posterior").get<double>();
  e.decoder_invoked = j.at("decoder_invoked").get<bool>();
  if (j.contains("error")) e.error = j.at("error").get<std::string>();
  return e;
}

TransformerSpeechModel::TransformerSpeechModel(std::shared_ptr<const ModelParameters<float>> params)
    : params_(std::move(params)) {
  if (!params_) throw InvalidInput("TransformerSpeechModel: null parameters");
}

Eigen::MatrixXf TransformerSpeechModel::encode(const MelSpectrogram& mel) const {
  return cfh::encode<float>(mel.frames, *params_).states;
}

Eigen::VectorXd TransformerSpeechModel::noise_logits(const Eigen::MatrixXf& states) const {
  const EncoderOutput<float> e{states};
  return noise_head(mean_pool_time(e), *params_).cast<double>();
}

std::string TransformerSpeechModel::transcribe(const Eigen::MatrixXf& states) const {
  const EncoderOutput<float> e{states};
  const TokenSequence tokens = greedy_decode(e, *params_, params_->config.max_target_len);
  return params_->config.tokenizer().decode(tokens);
}

DetectionEvent detect_features(const MelSpectrogram& mel, const SpeechModel& model,
                               const KeywordLexicon& lexicon, double tau) {
  const Eigen::MatrixXf states = model.encode(mel);
  const GateDecision g = gate(model.noise_logits(states), tau);
  DetectionEvent event;
  event.speech_posterior = g.speech_posterior;
  event.scene_argmax = g.scene_argmax;
  if (!g.speech) {
    event.klass = CfhClass::kNoise;
    return event;
  }
  event.decoder_invoked = true;
  event.transcript = model.transcribe(states);
  event.klass = classify_transcript(event.transcript, lexicon);
  return event;
}

DetectionEvent detect(const Waveform& w, const SpeechModel& model, const KeywordLexicon& lexicon, double tau) {
  return detect_features(featurize(w, model.frontend()), model, lexicon, tau);
}

BatchDetection detect_batch(const std::vector<ManifestEntry>& entries, const SpeechModel& model,
                            const KeywordLexicon& lexicon, double tau) {
  BatchDetection out;
  out.events.reserve(entries.size());
  for (const auto& entry : entries) {
    DetectionEvent event;
    try {
      event = detect(read_wav(entry.audio), model, lexicon, tau);
    } catch (const InvalidInput& e) {
      event = DetectionEvent{};
      event.error = e.what();
      ++out.errors;
    }
    if (event.decoder_invoked) ++out.decoder_invocations;
    out.events.push_back(std::move(event));
  }
  return out;
}

}  // namespace cfh
