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

#include "cfh/gradcheck.hpp"

#include "cfh/losses.hpp"

namespace cfh {

namespace {

std::vector<TrainingExample> random_batch(const ModelConfig& cfg, int n_speech, int n_noise, std::mt19937_64& rng) {
  std::uniform_real_distribution<float> level(-1.0f, 1.0f);
  std::uniform_int_distribution<int> token(kNumSpecials, cfg.vocab_size() - 1);
  std::uniform_int_distribution<int> scene(1, cfg.n_noise_classes() - 1);
  std::uniform_int_distribution<int> length(1, std::min(6, cfg.max_target_len - 1));
  std::vector<TrainingExample> batch;
  for (int i = 0; i < n_speech + n_noise; ++i) {
    TrainingExample ex;
    ex.mel = Eigen::MatrixXf::NullaryExpr(cfg.n_frames(), cfg.n_mels(), [&] { return level(rng); });
    if (i < n_speech) {
      TokenSequence t(static_cast<std::size_t>(length(rng)));
      for (int& id : t) id = token(rng);
      ex.target_tokens = t;
    } else {
      ex.noise_label = scene(rng);
    }
    batch.push_back(std::move(ex));
  }
  return batch;
}

}  // namespace

GradcheckSuite gradcheck_suite(const ModelConfig& cfg, const GradcheckOptions& opt) {
  cfg.validate();
  std::mt19937_64 rng(opt.seed);
  ModelParameters<double> params = init_parameters<double>(cfg, opt.seed);
  std::normal_distribution<double> jitter(0.0, 0.1);
  for_each_tensor(params, [&](const std::string&, Mat<double>& t) {
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] += jitter(rng);
  });

  struct Path {
    std::string name;
    std::vector<TrainingExample> batch;
    double noise_weight;
  };
  std::vector<Path> paths;
  paths.push_back({"noise", random_batch(cfg, 0, 2, rng), 1.0});
  paths.push_back({"seq2seq", random_batch(cfg, 2, 0, rng), 0.0});
  paths.push_back({"multitask", random_batch(cfg, 1, 1, rng), 1.0});

  GradcheckSuite suite;
  suite.passed = true;
  for (const Path& path : paths) {
    auto loss = [&](const ModelParameters<double>& p, ModelParameters<double>* grad) {
      const LossBreakdown l = multitask_loss<double>(p, path.batch, grad, path.noise_weight);
      return path.noise_weight * l.l_noise + l.l_seq2seq;
    };
    const GradcheckReport report = gradcheck(loss, params, opt);
    suite.max_rel_error = std::max(suite.max_rel_error, report.max_rel_error);
    suite.passed = suite.passed && report.passed;
    suite.paths[path.name] = report;
  }
  return suite;
}

}  // namespace cfh
