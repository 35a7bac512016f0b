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

#ifndef CFH_CHECKPOINT_HPP
#define CFH_CHECKPOINT_HPP

#include <optional>
#include <string>

#include "json.hpp"

#include "cfh/model.hpp"

namespace cfh {

/// Layout (all integers little-endian uint32, tensor data little-endian
/// float32, row-major):
///
///   "CFHCKPT\0"             8-byte magic
///   version                 currently 1
///   header_len, header      UTF-8 JSON: {"config": ..., "metadata": ...}
///   section_count
///   per section:
///     name_len, name        "live" or "ema"
///     tensor_count
///     per tensor: name_len, name, rows, cols, rows*cols floats
struct Checkpoint {
  ModelParameters<float> live;
  std::optional<ModelParameters<float>> ema;
  nlohmann::json metadata = nlohmann::json::object();

  const ModelConfig& config() const { return live.config; }
  /// EMA weights when present, otherwise the live weights.
  const ModelParameters<float>& inference_parameters() const { return ema ? *ema : live; }
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace cfh

#endif  // CFH_CHECKPOINT_HPP
