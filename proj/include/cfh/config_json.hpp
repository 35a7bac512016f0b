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

#ifndef CFH_CONFIG_JSON_HPP
#define CFH_CONFIG_JSON_HPP

#include "json.hpp"

#include "cfh/model_config.hpp"

namespace cfh {

nlohmann::json to_json(const FrontendConfig& cfg);
/// Missing keys keep the values already in `base`.
FrontendConfig frontend_from_json(const nlohmann::json& j, FrontendConfig base = {});

nlohmann::json to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const nlohmann::json& j, ModelConfig base = ModelConfig::toy());

}  // namespace cfh

#endif  // CFH_CONFIG_JSON_HPP
