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

#include "cfh/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numeric>
#include <random>

#include "cfh/evaluation.hpp"

namespace cfh {

namespace fs = std::filesystem;
using nlohmann::json;

void TrainConfig::validate() const {
  if (!(base_lr >= 0.0)) throw InvalidInput("train config: base_lr must be >= 0");
  if (batch_size < 1) throw InvalidInput("train config: batch_size must be >= 1");
  if (epochs < 1) throw InvalidInput("train config: epochs must be >= 1");
  if (max_steps < 0) throw InvalidInput("train config: max_steps must be >= 0");
  if (!(ema_coefficient >= 0.0 && ema_coefficient <= 1.0))
    throw InvalidInput("train config: ema_coefficient must lie in [0, 1]");
  if (!(speech_fraction >= 0.0 && speech_fraction < 1.0))
    throw InvalidInput("train config: speech_fraction must lie in [0, 1)");
  if (eval_every < 1) throw InvalidInput("train config: eval_every must be >= 1");
  if (!(tau >= 0.0 && tau <= 1.0)) throw InvalidInput("train config: tau must lie in [0, 1]");
}

json to_json(const TrainConfig& c) {
  return json{{"base_lr", c.base_lr},
              {"batch_size", c.batch_size},
              {"epochs", c.epochs},
              {"max_steps", c.max_steps},
              {"beta1", c.adamw.beta1},
              {"beta2", c.adamw.beta2},
              {"adam_eps", c.adamw.eps},
              {"weight_decay", c.adamw.weight_decay},
              {"ema_coefficient", c.ema_coefficient},
              {"single_task", c.single_task},
              {"speech_fraction", c.speech_fraction},
              {"seed", c.seed},
              {"eval_every", c.eval_every},
              {"tau", c.tau}};
}

TrainConfig train_config_from_json(const json& j, TrainConfig c) {
  c.base_lr = j.value("base_lr", c.base_lr);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.epochs = j.value("epochs", c.epochs);
  c.max_steps = j.value("max_steps", c.max_steps);
  c.adamw.beta1 = j.value("beta1", c.adamw.beta1);
  c.adamw.beta2 = j.value("beta2", c.adamw.beta2);
  c.adamw.eps = j.value("adam_eps", c.adamw.eps);
  c.adamw.weight_decay = j.value("weight_decay", c.adamw.weight_decay);
  c.ema_coefficient = j.value("ema_coefficient", c.ema_coefficient);
  c.single_task = j.value("single_task", c.single_task);
  c.speech_fraction = j.value("speech_fraction", c.speech_fraction);
  c.seed = j.value("seed", c.seed);
  c.eval_every = j.value("eval_every", c.eval_every);
  c.tau = j.value("tau", c.tau);
  return c;
}

json to_json(const EpochMetrics& m) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  return json{{"epoch", m.epoch},
              {"step", m.step},
              {"l_noise", m.l_noise},
              {"l_seq2seq", m.l_seq2seq},
              {"l_multi", m.l_multi},
              {"lr", m.lr},
              {"eval_accuracy", opt(m.eval_accuracy)},
              {"eval_macro_f1", opt(m.eval_macro_f1)}};
}

EvalSet load_eval_set(const std::vector<ManifestEntry>& entries, const FrontendConfig& frontend) {
  EvalSet set;
  set.entries = entries;
  set.mels.reserve(entries.size());
  for (const auto& e : entries) set.mels.push_back(featurize(read_wav(e.audio), frontend));
  return set;
}

long planned_steps(std::size_t n_examples, const TrainConfig& cfg) {
  const long per_epoch = (static_cast<long>(n_examples) + cfg.batch_size - 1) / cfg.batch_size;
  const long total = per_epoch * cfg.epochs;
  return cfg.max_steps > 0 ? std::min(total, cfg.max_steps) : total;
}

CfhReport evaluate_on(const ModelParameters<float>& params, const EvalSet& eval, const KeywordLexicon& lexicon,
                      double tau, ClassSpace space) {
  const TransformerSpeechModel model(std::make_shared<const ModelParameters<float>>(params));
  std::vector<DetectionEvent> events;
  long invocations = 0;
  for (const auto& mel : eval.mels) {
    events.push_back(detect_features(mel, model, lexicon, tau));
    if (events.back().decoder_invoked) ++invocations;
  }
  return evaluate_cfh(events, eval.entries, space, invocations);
}

FitSummary fit_summary(const ModelParameters<float>& params, std::span<const TrainingExample> examples) {
  long noise_correct = 0;
  long tokens = 0;
  long tokens_correct = 0;
  for (const auto& ex : examples) {
    const EncoderOutput<float> enc = encode<float>(ex.mel, params);
    Eigen::Index best = 0;
    noise_head(mean_pool_time(enc), params).maxCoeff(&best);
    if (best == ex.noise_label) ++noise_correct;
    if (!ex.has_transcript()) continue;
    const TokenSequence out = teacher_output(*ex.target_tokens);
    const Mat<float> logits = decoder_forward(teacher_input(*ex.target_tokens), enc, params);
    for (Eigen::Index t = 0; t < logits.rows(); ++t) {
      Eigen::Index arg = 0;
      logits.row(t).maxCoeff(&arg);
      tokens_correct += arg == out[static_cast<std::size_t>(t)] ? 1 : 0;
      ++tokens;
    }
  }
  FitSummary s;
  s.noise_accuracy = examples.empty() ? 0.0 : static_cast<double>(noise_correct) / static_cast<double>(examples.size());
  s.token_accuracy = tokens == 0 ? 0.0 : static_cast<double>(tokens_correct) / static_cast<double>(tokens);
  return s;
}

namespace {

// Yields example indices batch by batch, reshuffling at every epoch.
class BatchPlanner {
 public:
  BatchPlanner(std::span<const TrainingExample> examples, const TrainConfig& cfg)
      : cfg_(cfg), rng_(cfg.seed ^ 0x9E3779B97F4A7C15ULL) {
    for (std::size_t i = 0; i < examples.size(); ++i) {
      all_.push_back(i);
      (examples[i].has_transcript() ? speech_ : noise_).push_back(i);
    }
    if (cfg.speech_fraction > 0.0 && (speech_.empty() || noise_.empty()))
      throw InvalidInput("train: speech_fraction needs both speech and noise examples");
  }

  std::vector<std::vector<std::size_t>> epoch() {
    std::vector<std::vector<std::size_t>> batches;
    const std::size_t n_batches = (all_.size() + cfg_.batch_size - 1) / cfg_.batch_size;
    if (cfg_.speech_fraction <= 0.0) {
      std::shuffle(all_.begin(), all_.end(), rng_);
      for (std::size_t b = 0; b < n_batches; ++b) {
        const std::size_t lo = b * cfg_.batch_size;
        const std::size_t hi = std::min(all_.size(), lo + cfg_.batch_size);
        batches.emplace_back(all_.begin() + static_cast<long>(lo), all_.begin() + static_cast<long>(hi));
      }
      return batches;
    }
    const auto n_speech = static_cast<std::size_t>(std::lround(cfg_.speech_fraction * cfg_.batch_size));
    for (std::size_t b = 0; b < n_batches; ++b) {
      std::vector<std::size_t> batch;
      for (std::size_t i = 0; i < static_cast<std::size_t>(cfg_.batch_size); ++i) {
        batch.push_back(i < n_speech ? draw(speech_, speech_pos_) : draw(noise_, noise_pos_));
      }
      batches.push_back(std::move(batch));
    }
    return batches;
  }

 private:
  std::size_t draw(std::vector<std::size_t>& pool, std::size_t& pos) {
    if (pos == 0) std::shuffle(pool.begin(), pool.end(), rng_);
    const std::size_t v = pool[pos];
    pos = (pos + 1) % pool.size();
    return v;
  }

  const TrainConfig& cfg_;
  std::mt19937_64 rng_;
  std::vector<std::size_t> all_, speech_, noise_;
  std::size_t speech_pos_ = 0, noise_pos_ = 0;
};

}  // namespace

TrainResult train_model(ModelParameters<float> init, std::span<const TrainingExample> examples,
                        const TrainConfig& cfg, const EvalSet* eval, const KeywordLexicon& lexicon,
                        const std::function<void(const EpochMetrics&)>& on_epoch,
                        const std::function<void(const ModelParameters<float>&, const ModelParameters<float>&)>&
                            on_diverged) {
  cfg.validate();
  if (examples.empty()) throw InvalidInput("train: empty dataset");

  TrainResult result;
  result.live = std::move(init);
  EmaState<float> ema{result.live, cfg.ema_coefficient};
  OptimizerState<float> opt(result.live.config);
  ModelParameters<float> grad = zero_parameters<float>(result.live.config);
  ModelParameters<float> good_live = result.live;
  ModelParameters<float> good_ema = ema.shadow;

  BatchPlanner planner(examples, cfg);
  const long total = planned_steps(examples.size(), cfg);
  const ClassSpace space = cfg.single_task ? ClassSpace::k3Class : ClassSpace::k4Class;
  const double eval_tau = cfg.single_task ? 0.0 : cfg.tau;

  auto diverge = [&](const std::string& why) {
    if (on_diverged) on_diverged(good_live, good_ema);
    throw TrainingDiverged(why);
  };

  long step = 0;
  std::vector<TrainingExample> batch;
  for (int epoch = 1; epoch <= cfg.epochs && step < total; ++epoch) {
    double sum_noise = 0.0, sum_seq = 0.0, sum_multi = 0.0, lr = 0.0;
    long n_batches = 0;
    for (const auto& indices : planner.epoch()) {
      if (step >= total) break;
      batch.clear();
      for (const std::size_t i : indices) batch.push_back(examples[i]);
      set_zero(grad);
      const LossBreakdown loss = multitask_loss<float>(result.live, batch, &grad, cfg.noise_weight());
      if (!std::isfinite(loss.l_multi)) {
        diverge("train: non-finite loss at step " + std::to_string(step));
      }
      lr = cosine_lr(step, total, cfg.base_lr);
      try {
        adamw_step(result.live, grad, opt, lr, cfg.adamw);
      } catch (const TrainingDiverged& e) {
        diverge(std::string(e.what()) + " at step " + std::to_string(step));
      }
      ema_update(result.live, ema);
      ++step;
      sum_noise += loss.l_noise;
      sum_seq += loss.l_seq2seq;
      sum_multi += loss.l_multi;
      ++n_batches;
    }

    EpochMetrics m;
    m.epoch = epoch;
    m.step = step;
    m.l_noise = sum_noise / static_cast<double>(n_batches);
    m.l_seq2seq = sum_seq / static_cast<double>(n_batches);
    m.l_multi = sum_multi / static_cast<double>(n_batches);
    m.lr = lr;
    const bool last = epoch == cfg.epochs || step >= total;
    if (eval != nullptr && !eval->mels.empty() && (epoch % cfg.eval_every == 0 || last)) {
      const CfhReport r = evaluate_on(ema.shadow, *eval, lexicon, eval_tau, space);
      m.eval_accuracy = r.metrics.accuracy;
      m.eval_macro_f1 = r.metrics.macro_f1;
    }
    result.epochs.push_back(m);
    if (on_epoch) on_epoch(m);
    good_live = result.live;
    good_ema = ema.shadow;
  }

  result.ema = std::move(ema.shadow);
  result.steps = step;
  return result;
}

TrainOutputs train(const ModelConfig& model_cfg_in, const std::vector<ManifestEntry>& train_entries,
                   const std::vector<ManifestEntry>& eval_entries, const TrainConfig& cfg,
                   const std::string& out_dir, const KeywordLexicon& lexicon) {
  cfg.validate();
  if (train_entries.empty()) throw InvalidInput("train: empty training manifest");
  ModelConfig model_cfg = model_cfg_in;
  if (model_cfg.noise_scenes.empty()) model_cfg.noise_scenes = scene_names(train_entries);
  model_cfg.validate();

  fs::create_directories(out_dir);
  TrainOutputs out;
  out.checkpoint_path = (fs::path(out_dir) / "checkpoint.bin").string();
  out.metrics_path = (fs::path(out_dir) / "metrics.jsonl").string();

  const std::vector<TrainingExample> examples = load_examples(train_entries, model_cfg);
  const EvalSet eval = load_eval_set(eval_entries, model_cfg.frontend);

  std::ofstream log(out.metrics_path);
  if (!log) throw std::runtime_error("train: cannot write " + out.metrics_path);

  json metadata{{"train", to_json(cfg)}, {"lexicon", lexicon.to_json()}};
  auto write_checkpoint = [&](const ModelParameters<float>& live, const ModelParameters<float>& ema,
                              const json& meta) {
    Checkpoint ckpt;
    ckpt.live = live;
    ckpt.ema = ema;
    ckpt.metadata = meta;
    save_checkpoint(out.checkpoint_path, ckpt);
  };

  out.result = train_model(
      init_parameters<float>(model_cfg, cfg.seed), examples, cfg, eval.mels.empty() ? nullptr : &eval, lexicon,
      [&](const EpochMetrics& m) { log << to_json(m).dump() << '\n' << std::flush; },
      [&](const ModelParameters<float>& live, const ModelParameters<float>& ema) {
        json meta = metadata;
        meta["diverged"] = true;
        write_checkpoint(live, ema, meta);
      });

  const FitSummary fit = fit_summary(out.result.ema, examples);
  metadata["steps"] = out.result.steps;
  metadata["train_noise_accuracy"] = fit.noise_accuracy;
  metadata["train_token_accuracy"] = fit.token_accuracy;
  write_checkpoint(out.result.live, out.result.ema, metadata);
  return out;
}

}  // namespace cfh
