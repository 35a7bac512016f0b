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

#include "cfh/model_config.hpp"

#include <algorithm>
#include <set>

namespace cfh {

int ModelConfig::scene_id(const std::string& name) const {
  const auto it = std::find(noise_scenes.begin(), noise_scenes.end(), name);
  return it == noise_scenes.end() ? -1 : static_cast<int>(it - noise_scenes.begin()) + 1;
}

void ModelConfig::validate() const {
  frontend.validate();
  if (d_model <= 0 || n_heads <= 0 || d_model % n_heads != 0)
    throw InvalidInput("model config: d_model must be a positive multiple of n_heads");
  if (n_enc_layers < 0 || n_dec_layers < 0) throw InvalidInput("model config: negative layer count");
  if (mlp_ratio <= 0) throw InvalidInput("model config: mlp_ratio must be positive");
  if (stem_stride <= 0 || encoder_positions() < 1)
    throw InvalidInput("model config: stem_stride leaves no encoder positions");
  if (max_target_len < 2) throw InvalidInput("model config: max_target_len must be >= 2");
  if (vocab_size() < kNumSpecials + 1) throw InvalidInput("model config: empty alphabet");
  if (n_noise_classes() < 1) throw InvalidInput("model config: need at least one noise scene");
  const std::set<std::string> unique(noise_scenes.begin(), noise_scenes.end());
  if (unique.size() != noise_scenes.size()) throw InvalidInput("model config: duplicate noise scene");
  CharTokenizer check(alphabet);
}

ModelConfig ModelConfig::toy() {
  ModelConfig cfg;
  cfg.preset = "toy";
  cfg.frontend.clip_seconds = 2.0;
  cfg.d_model = 64;
  cfg.n_heads = 4;
  cfg.n_enc_layers = 2;
  cfg.n_dec_layers = 2;
  cfg.stem_stride = 4;
  cfg.max_target_len = 24;
  cfg.noise_scenes = toy_scene_names();
  return cfg;
}

ModelConfig ModelConfig::full_size() {
  ModelConfig cfg;
  cfg.preset = "paper";
  cfg.frontend.clip_seconds = 30.0;
  cfg.d_model = 384;
  cfg.n_heads = 6;
  cfg.n_enc_layers = 4;
  cfg.n_dec_layers = 4;
  cfg.stem_stride = 2;
  cfg.max_target_len = 448;
  // CochlScene's 13 acoustic scenes.
  cfg.noise_scenes = {"bus",        "cafe",   "car",        "crowdedindoor", "elevator",
                      "kitchen",    "park",   "residentialarea", "restaurant", "restroom",
                      "street",     "subway", "subwaystation"};
  return cfg;
}

ModelConfig ModelConfig::from_preset(const std::string& name) {
  if (name == "toy") return toy();
  if (name == "paper") return full_size();
  throw InvalidInput("unknown model preset: " + name);
}

}  // namespace cfh
