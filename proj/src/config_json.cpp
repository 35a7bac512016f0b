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

#include "cfh/config_json.hpp"

namespace cfh {

using nlohmann::json;

json to_json(const FrontendConfig& cfg) {
  return json{{"target_rate", cfg.target_rate}, {"fft_size", cfg.fft_size},
              {"hop", cfg.hop},                 {"mel_bins", cfg.mel_bins},
              {"window", "hann"},               {"clip_seconds", cfg.clip_seconds}};
}

FrontendConfig frontend_from_json(const json& j, FrontendConfig base) {
  base.target_rate = j.value("target_rate", base.target_rate);
  base.fft_size = j.value("fft_size", base.fft_size);
  base.hop = j.value("hop", base.hop);
  base.mel_bins = j.value("mel_bins", base.mel_bins);
  base.clip_seconds = j.value("clip_seconds", base.clip_seconds);
  if (j.value("window", std::string("hann")) != "hann")
    throw InvalidInput("frontend: only the hann window is supported");
  return base;
}

json to_json(const ModelConfig& cfg) {
  return json{{"preset", cfg.preset},
              {"frontend", to_json(cfg.frontend)},
              {"d_model", cfg.d_model},
              {"n_heads", cfg.n_heads},
              {"n_enc_layers", cfg.n_enc_layers},
              {"n_dec_layers", cfg.n_dec_layers},
              {"mlp_ratio", cfg.mlp_ratio},
              {"stem_stride", cfg.stem_stride},
              {"max_target_len", cfg.max_target_len},
              {"alphabet", cfg.alphabet},
              {"noise_scenes", cfg.noise_scenes},
              {"vocab_size", cfg.vocab_size()},
              {"n_noise_classes", cfg.n_noise_classes()}};
}

ModelConfig model_config_from_json(const json& j, ModelConfig base) {
  if (j.contains("preset")) {
    const std::string preset = j.at("preset").get<std::string>();
    // "custom" keeps the base shape and relies on the explicit keys below.
    if (preset == "custom") {
      base.preset = preset;
    } else if (preset != base.preset) {
      base = ModelConfig::from_preset(preset);
    }
  }
  if (j.contains("frontend")) base.frontend = frontend_from_json(j.at("frontend"), base.frontend);
  base.d_model = j.value("d_model", base.d_model);
  base.n_heads = j.value("n_heads", base.n_heads);
  base.n_enc_layers = j.value("n_enc_layers", base.n_enc_layers);
  base.n_dec_layers = j.value("n_dec_layers", base.n_dec_layers);
  base.mlp_ratio = j.value("mlp_ratio", base.mlp_ratio);
  base.stem_stride = j.value("stem_stride", base.stem_stride);
  base.max_target_len = j.value("max_target_len", base.max_target_len);
  base.alphabet = j.value("alphabet", base.alphabet);
  if (j.contains("noise_scenes")) base.noise_scenes = j.at("noise_scenes").get<std::vector<std::string>>();
  return base;
}

}  // namespace cfh
