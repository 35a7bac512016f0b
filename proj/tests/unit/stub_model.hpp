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

#ifndef CFH_TESTS_STUB_MODEL_HPP
#define CFH_TESTS_STUB_MODEL_HPP

#include <string>
#include <vector>

#include "cfh/detection.hpp"

namespace cfh::testing {

/// Model double: the "encoder" returns the mel mean, and the noise head calls
/// anything louder than silence speech. Counts decoder calls.
class StubModel : public SpeechModel {
 public:
  explicit StubModel(std::string transcript = "save me") : transcript_(std::move(transcript)) {
    frontend_.clip_seconds = 0.1;
    frontend_.mel_bins = 8;
  }

  const FrontendConfig& frontend() const override { return frontend_; }
  Eigen::MatrixXf encode(const MelSpectrogram& mel) const override {
    return Eigen::MatrixXf::Constant(1, 1, mel.frames.mean());
  }
  Eigen::VectorXd noise_logits(const Eigen::MatrixXf& states) const override {
    const bool loud = states(0, 0) > -1.4f;
    Eigen::VectorXd logits(4);
    logits << (loud ? 6.0 : -6.0), 0.0, 1.0, 0.5;
    return logits;
  }
  std::string transcribe(const Eigen::MatrixXf&) const override {
    ++decoder_calls;
    return transcript_;
  }
  const std::vector<std::string>& scene_names() const override { return scenes_; }

  mutable long decoder_calls = 0;

 private:
  FrontendConfig frontend_;
  std::string transcript_;
  std::vector<std::string> scenes_{"traffic", "office", "machine"};
};

}  // namespace cfh::testing

#endif  // CFH_TESTS_STUB_MODEL_HPP
