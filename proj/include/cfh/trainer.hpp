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

#ifndef CFH_TRAINER_HPP
#define CFH_TRAINER_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "cfh/checkpoint.hpp"
#include "cfh/detection.hpp"
#include "cfh/evaluation.hpp"
#include "cfh/losses.hpp"
#include "cfh/manifest.hpp"
#include "cfh/optim.hpp"

namespace cfh {

struct TrainConfig {
  double base_lr = 1e-4;
  int batch_size = 32;
  int epochs = 10;
  /// Caps the optimizer steps (and the cosine horizon) when > 0.
  long max_steps = 0;
  AdamWConfig adamw;
  double ema_coefficient = 0.5;
  /// Drops the noise loss from the objective (the single-task baseline).
  bool single_task = false;
  /// Speech share of every batch; 0 mixes the merged manifest uniformly.
  double speech_fraction = 0.0;
  std::uint64_t seed = 0;
  /// Held-out evaluation every n epochs (and always after the last).
  int eval_every = 1;
  double tau = 0.5;

  double noise_weight() const { return single_task ? 0.0 : 1.0; }
  void validate() const;
};

nlohmann::json to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base = {});

struct EpochMetrics {
  int epoch = 0;
  long step = 0;
  double l_noise = 0.0;
  double l_seq2seq = 0.0;
  double l_multi = 0.0;
  double lr = 0.0;
  std::optional<double> eval_accuracy;
  std::optional<double> eval_macro_f1;
};

nlohmann::json to_json(const EpochMetrics& m);

/// Held-out clips already featurized, with their manifest labels.
struct EvalSet {
  std::vector<MelSpectrogram> mels;
  std::vector<ManifestEntry> entries;
};

EvalSet load_eval_set(const std::vector<ManifestEntry>& entries, const FrontendConfig& frontend);

struct TrainResult {
  ModelParameters<float> live;
  ModelParameters<float> ema;
  std::vector<EpochMetrics> epochs;
  long steps = 0;
};

/// Total optimizer steps for a dataset size under `cfg`.
long planned_steps(std::size_t n_examples, const TrainConfig& cfg);

/// AdamW on the multitask loss with cosine decay and a parameter EMA. Throws
/// TrainingDiverged on a non-finite loss or gradient; `on_diverged` receives
/// the last parameters that completed an epoch cleanly.
TrainResult train_model(ModelParameters<float> init, std::span<const TrainingExample> examples,
                        const TrainConfig& cfg, const EvalSet* eval = nullptr,
                        const KeywordLexicon& lexicon = KeywordLexicon::english_default(),
                        const std::function<void(const EpochMetrics&)>& on_epoch = {},
                        const std::function<void(const ModelParameters<float>&, const ModelParameters<float>&)>&
                            on_diverged = {});

/// Held-out call-for-help score of `params`: 4-class at cfg.tau, or 3-class at
/// tau 0 for the single-task objective.
CfhReport evaluate_on(const ModelParameters<float>& params, const EvalSet& eval, const KeywordLexicon& lexicon,
                      double tau, ClassSpace space);

struct FitSummary {
  double noise_accuracy = 0.0;
  double token_accuracy = 0.0;
};

/// Noise-head accuracy (argmax over all K + 1 classes) and teacher-forced token
/// accuracy (including eot) over a labeled set.
FitSummary fit_summary(const ModelParameters<float>& params, std::span<const TrainingExample> examples);

struct TrainOutputs {
  std::string checkpoint_path;
  std::string metrics_path;
  TrainResult result;
};

/// Featurizes the manifests, trains, writes `checkpoint.bin` (live + EMA) and
/// `metrics.jsonl` into out_dir.
TrainOutputs train(const ModelConfig& model_cfg, const std::vector<ManifestEntry>& train_entries,
                   const std::vector<ManifestEntry>& eval_entries, const TrainConfig& cfg,
                   const std::string& out_dir, const KeywordLexicon& lexicon = KeywordLexicon::english_default());

}  // namespace cfh

#endif  // CFH_TRAINER_HPP
