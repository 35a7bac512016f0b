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

#ifndef CFH_EVALUATION_HPP
#define CFH_EVALUATION_HPP

#include <string>
#include <vector>

#include "json.hpp"

#include "cfh/detection.hpp"
#include "cfh/manifest.hpp"

namespace cfh {

using CountMatrix = Eigen::Matrix<long, Eigen::Dynamic, Eigen::Dynamic>;

/// Rows are true classes, columns predicted classes.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::vector<std::string> labels);
  ConfusionMatrix(std::vector<std::string> labels, CountMatrix counts);

  void accumulate(const std::string& true_label, const std::string& predicted_label);
  void accumulate(int true_index, int predicted_index);

  const std::vector<std::string>& labels() const { return labels_; }
  const CountMatrix& counts() const { return counts_; }
  int index_of(const std::string& label) const;
  long total() const { return counts_.sum(); }
  long trace() const { return counts_.trace(); }

  friend bool operator==(const ConfusionMatrix& a, const ConfusionMatrix& b) {
    return a.labels_ == b.labels_ && a.counts_ == b.counts_;
  }

 private:
  std::vector<std::string> labels_;
  CountMatrix counts_;
};

struct ClassMetrics {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long support = 0;
};

struct MetricsReport {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::vector<ClassMetrics> per_class;
};

/// trace / total. Throws InvalidInput on an empty matrix.
double accuracy(const ConfusionMatrix& cm);

/// Unweighted mean of per-class F1. Zero denominators give 0, and classes with
/// no support still count (as 0).
double macro_f1(const ConfusionMatrix& cm);

MetricsReport metrics(const ConfusionMatrix& cm);

enum class ClassSpace { k3Class, k4Class };

std::string_view to_string(ClassSpace s);
ClassSpace class_space_from_string(std::string_view s);
std::vector<std::string> class_labels(ClassSpace s);

struct CfhReport {
  ClassSpace class_space = ClassSpace::k4Class;
  ConfusionMatrix confusion;
  MetricsReport metrics;
  long decoder_invocations = 0;
  long total = 0;
  long errors = 0;
};

/// Scores events against manifest labels. Speech entries need a cfh_class;
/// noise entries are "noise" in the 4-class space and "others" in the 3-class
/// space, where a noise prediction also counts as "others". Events carrying an
/// error are left out of the matrix and counted in `errors`.
CfhReport evaluate_cfh(const std::vector<DetectionEvent>& events, const std::vector<ManifestEntry>& entries,
                       ClassSpace space, long decoder_invocations);

struct NoiseSceneReport {
  std::string domain;
  ConfusionMatrix confusion;
  double accuracy = 0.0;
  long correct = 0;
  long total = 0;
  long skipped = 0;
};

/// Scene accuracy using argmax over the scene logits (ids 1..K). Entries
/// without a known noise_scene are skipped with a warning on stderr.
NoiseSceneReport evaluate_noise_scenes(const SpeechModel& model, const std::vector<ManifestEntry>& entries);

nlohmann::json to_json(const MetricsReport& m);
nlohmann::json to_json(const CfhReport& r);
nlohmann::json to_json(const NoiseSceneReport& r);
CfhReport cfh_report_from_json(const nlohmann::json& j);

/// Header row "true\predicted,<labels...>", then one row per true label.
std::string confusion_csv(const ConfusionMatrix& cm);
ConfusionMatrix parse_confusion_csv(const std::string& csv);

std::string format_table(const CfhReport& r);
std::string format_table(const NoiseSceneReport& r);

}  // namespace cfh

#endif  // CFH_EVALUATION_HPP
