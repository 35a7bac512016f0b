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

#ifndef CFH_MODEL_CONFIG_HPP
#define CFH_MODEL_CONFIG_HPP

#include <string>
#include <vector>

#include "cfh/audio.hpp"
#include "cfh/tokenizer.hpp"

namespace cfh {

/// Shape of the encoder-decoder and its noise head.
///
/// The encoder stem stacks `stem_stride` consecutive mel frames and projects
/// them to `d_model`, so the encoder runs over frames / stem_stride positions.
/// The noise head has one logit per noise scene plus class 0 for speech.
struct ModelConfig {
  std::string preset = "toy";
  FrontendConfig frontend;
  int d_model = 64;
  int n_heads = 4;
  int n_enc_layers = 2;
  int n_dec_layers = 2;
  int mlp_ratio = 4;
  int stem_stride = 4;
  int max_target_len = 24;
  std::string alphabet = std::string(kDefaultAlphabet);
  std::vector<std::string> noise_scenes;

  int vocab_size() const { return kNumSpecials + static_cast<int>(alphabet.size()); }
  int n_noise_classes() const { return static_cast<int>(noise_scenes.size()); }
  int n_frames() const { return static_cast<int>(frontend.frames()); }
  int n_mels() const { return frontend.mel_bins; }
  int encoder_positions() const { return n_frames() / stem_stride; }

  CharTokenizer tokenizer() const { return CharTokenizer(alphabet); }

  /// Class id of a scene name (1..K), or -1.
  int scene_id(const std::string& name) const;

  void validate() const;

  /// d_model 64, 2+2 layers, 2 s clips.
  static ModelConfig toy();
  /// Whisper-tiny shaped: d_model 384, 6 heads, 4+4 layers, 30 s clips, 13 scenes.
  static ModelConfig full_size();
  static ModelConfig from_preset(const std::string& name);
};

inline const std::vector<std::string>& toy_scene_names() {
  static const std::vector<std::string> names = {"traffic", "office", "restroom", "machine"};
  return names;
}

}  // namespace cfh

#endif  // CFH_MODEL_CONFIG_HPP
