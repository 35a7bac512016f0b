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

#include <cmath>
#include <fstream>
#include <random>

#include "doctest.h"

#include "cfh/checkpoint.hpp"
#include "cfh/trainer.hpp"
#include "test_util.hpp"

using namespace cfh;
using cfh::testing::temp_dir;
using cfh::testing::tiny_config;

namespace {

// Learnable toy task: noise examples sit at a level set by their scene,
// speech is brighter and spells "ab" or "ba".
std::vector<TrainingExample> toy_examples(const ModelConfig& cfg, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> jitter(0.0f, 0.05f);
  const CharTokenizer tok = cfg.tokenizer();
  std::vector<TrainingExample> out;
  for (int i = 0; i < n; ++i) {
    TrainingExample ex;
    ex.noise_label = i % (cfg.n_noise_classes() + 1);
    const float level = -1.0f + 0.5f * static_cast<float>(ex.noise_label);
    ex.mel = Eigen::MatrixXf::NullaryExpr(cfg.n_frames(), cfg.n_mels(), [&] { return level + jitter(rng); });
    if (ex.noise_label == 0) {
      const bool ab = (i / 4) % 2 == 0;
      ex.mel.col(0).array() += ab ? 0.5f : -0.5f;
      ex.target_tokens = tok.encode(ab ? "ab" : "ba");
    }
    out.push_back(std::move(ex));
  }
  return out;
}

TrainConfig quick_config() {
  TrainConfig tc;
  tc.base_lr = 3e-3;
  tc.batch_size = 8;
  tc.epochs = 6;
  tc.seed = 5;
  return tc;
}

}  // namespace

TEST_SUITE("trainer") {

TEST_CASE("train config JSON round trip and validation") {
  TrainConfig tc = quick_config();
  tc.max_steps = 17;
  tc.single_task = true;
  tc.speech_fraction = 0.25;
  tc.tau = 0.3;
  const TrainConfig back = train_config_from_json(nlohmann::json::parse(to_json(tc).dump()));
  CHECK(to_json(back) == to_json(tc));
  CHECK(back.noise_weight() == 0.0);
  CHECK(TrainConfig{}.noise_weight() == 1.0);

  TrainConfig bad;
  bad.batch_size = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  bad = TrainConfig{};
  bad.tau = 1.5;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  bad = TrainConfig{};
  bad.speech_fraction = 1.0;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
}

TEST_CASE("planned steps") {
  TrainConfig tc;
  tc.batch_size = 8;
  tc.epochs = 3;
  CHECK(planned_steps(16, tc) == 6);
  CHECK(planned_steps(17, tc) == 9);
  tc.max_steps = 4;
  CHECK(planned_steps(17, tc) == 4);
}

TEST_CASE("training is deterministic and lowers the loss") {
  const ModelConfig cfg = tiny_config();
  const auto examples = toy_examples(cfg, 48, 1);
  const TrainConfig tc = quick_config();
  const TrainResult a = train_model(init_parameters<float>(cfg, 5), examples, tc);
  const TrainResult b = train_model(init_parameters<float>(cfg, 5), examples, tc);
  REQUIRE(a.epochs.size() == 6);
  CHECK(a.steps == planned_steps(examples.size(), tc));
  CHECK(identical(a.live, b.live));
  CHECK(identical(a.ema, b.ema));
  for (std::size_t i = 0; i < a.epochs.size(); ++i) {
    CHECK(std::isfinite(a.epochs[i].l_multi));
    CHECK(a.epochs[i].l_multi == b.epochs[i].l_multi);
    CHECK(std::abs(a.epochs[i].l_multi - (a.epochs[i].l_noise + a.epochs[i].l_seq2seq)) < 1e-9);
  }
  CHECK(a.epochs.back().l_multi < 0.7 * a.epochs.front().l_multi);
  CHECK_FALSE(identical(a.live, a.ema));
}

TEST_CASE("max_steps caps training") {
  const ModelConfig cfg = tiny_config();
  const auto examples = toy_examples(cfg, 24, 2);
  TrainConfig tc = quick_config();
  tc.max_steps = 5;
  const TrainResult r = train_model(init_parameters<float>(cfg, 5), examples, tc);
  CHECK(r.steps == 5);
  CHECK(r.epochs.back().step == 5);
}

TEST_CASE("single-task training leaves the noise head alone") {
  const ModelConfig cfg = tiny_config();
  const auto examples = toy_examples(cfg, 24, 3);
  TrainConfig tc = quick_config();
  tc.single_task = true;
  tc.epochs = 2;
  tc.adamw.weight_decay = 0.0;
  const ModelParameters<float> init = init_parameters<float>(cfg, 5);
  const TrainResult r = train_model(init, examples, tc);
  CHECK(r.live.noise_head.weight == init.noise_head.weight);
  CHECK(r.live.noise_head.bias == init.noise_head.bias);
  CHECK_FALSE(identical(r.live, init));
}

TEST_CASE("a non-finite loss stops training") {
  const ModelConfig cfg = tiny_config();
  auto examples = toy_examples(cfg, 16, 4);
  examples[3].mel(0, 0) = std::numeric_limits<float>::quiet_NaN();
  TrainConfig tc = quick_config();
  tc.epochs = 2;
  bool called = false;
  CHECK_THROWS_AS(train_model(init_parameters<float>(cfg, 5), examples, tc, nullptr,
                              KeywordLexicon::english_default(), {},
                              [&](const ModelParameters<float>& live, const ModelParameters<float>&) {
                                called = true;
                                CHECK(all_finite(live));
                              }),
                  TrainingDiverged);
  CHECK(called);
}

TEST_CASE("train writes a checkpoint and metrics") {
  ModelConfig cfg = tiny_config();
  const auto dir = temp_dir("trainer_io");
  std::vector<ManifestEntry> entries;
  for (int i = 0; i < 8; ++i) {
    const std::string path = (dir / ("c" + std::to_string(i) + ".wav")).string();
    if (i % 2 == 0) {
      write_wav(path, cfh::testing::tone(400.0 + 100.0 * i, 0.08, 16000, 0.3));
      entries.push_back({path, std::string(i % 4 == 0 ? "ab" : "ca"), std::string("others"), std::nullopt,
                         std::nullopt});
    } else {
      write_wav(path, cfh::testing::tone(3000.0, 0.08, 16000, 0.05));
      entries.push_back({path, std::nullopt, std::nullopt, std::string(i % 4 == 1 ? "office" : "machine"),
                         std::string("in-domain")});
    }
  }
  TrainConfig tc = quick_config();
  tc.epochs = 2;
  tc.batch_size = 4;
  const TrainOutputs out = train(cfg, entries, entries, tc, (dir / "run").string());
  const Checkpoint ckpt = load_checkpoint(out.checkpoint_path);
  REQUIRE(ckpt.ema.has_value());
  CHECK(identical(ckpt.live, out.result.live));
  CHECK(identical(*ckpt.ema, out.result.ema));
  CHECK(ckpt.metadata.at("steps").get<long>() == 4);
  CHECK(ckpt.metadata.contains("train"));
  CHECK(ckpt.metadata.contains("lexicon"));
  std::ifstream metrics(out.metrics_path);
  std::string line;
  int lines = 0;
  while (std::getline(metrics, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.contains("l_multi"));
    CHECK(j.contains("eval_accuracy"));
    ++lines;
  }
  CHECK(lines == 2);
}

}  // TEST_SUITE
