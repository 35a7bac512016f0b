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

#include "cfh/evaluation.hpp"

#include <algorithm>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace cfh {

using nlohmann::json;

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> labels)
    : labels_(std::move(labels)),
      counts_(CountMatrix::Zero(static_cast<Eigen::Index>(labels_.size()),
                                static_cast<Eigen::Index>(labels_.size()))) {
  if (labels_.empty()) throw InvalidInput("confusion matrix: no labels");
}

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> labels, CountMatrix counts)
    : labels_(std::move(labels)), counts_(std::move(counts)) {
  const auto q = static_cast<Eigen::Index>(labels_.size());
  if (q == 0 || counts_.rows() != q || counts_.cols() != q)
    throw InvalidInput("confusion matrix: counts must be square with one row per label");
  if ((counts_.array() < 0).any()) throw InvalidInput("confusion matrix: negative count");
}

int ConfusionMatrix::index_of(const std::string& label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw InvalidInput("confusion matrix: unknown label '" + label + "'");
  return static_cast<int>(it - labels_.begin());
}

void ConfusionMatrix::accumulate(const std::string& true_label, const std::string& predicted_label) {
  accumulate(index_of(true_label), index_of(predicted_label));
}

void ConfusionMatrix::accumulate(int true_index, int predicted_index) {
  const int q = static_cast<int>(labels_.size());
  if (true_index < 0 || true_index >= q || predicted_index < 0 || predicted_index >= q)
    throw InvalidInput("confusion matrix: class index out of range");
  counts_(true_index, predicted_index) += 1;
}

double accuracy(const ConfusionMatrix& cm) {
  const long total = cm.total();
  if (total <= 0) throw InvalidInput("accuracy: empty confusion matrix");
  return static_cast<double>(cm.trace()) / static_cast<double>(total);
}

namespace {

ClassMetrics class_metrics(const ConfusionMatrix& cm, Eigen::Index c) {
  const CountMatrix& m = cm.counts();
  ClassMetrics out;
  out.label = cm.labels()[static_cast<std::size_t>(c)];
  const long tp = m(c, c);
  const long predicted = m.col(c).sum();
  const long actual = m.row(c).sum();
  out.support = actual;
  out.precision = predicted > 0 ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
  out.recall = actual > 0 ? static_cast<double>(tp) / static_cast<double>(actual) : 0.0;
  const double denom = out.precision + out.recall;
  out.f1 = denom > 0.0 ? 2.0 * out.precision * out.recall / denom : 0.0;
  return out;
}

}  // namespace

double macro_f1(const ConfusionMatrix& cm) {
  if (cm.total() <= 0) throw InvalidInput("macro_f1: empty confusion matrix");
  double sum = 0.0;
  for (Eigen::Index c = 0; c < cm.counts().rows(); ++c) sum += class_metrics(cm, c).f1;
  return sum / static_cast<double>(cm.counts().rows());
}

MetricsReport metrics(const ConfusionMatrix& cm) {
  MetricsReport r;
  r.accuracy = accuracy(cm);
  r.macro_f1 = macro_f1(cm);
  for (Eigen::Index c = 0; c < cm.counts().rows(); ++c) r.per_class.push_back(class_metrics(cm, c));
  return r;
}

std::string_view to_string(ClassSpace s) { return s == ClassSpace::k3Class ? "3class" : "4class"; }

ClassSpace class_space_from_string(std::string_view s) {
  if (s == "3class") return ClassSpace::k3Class;
  if (s == "4class") return ClassSpace::k4Class;
  throw InvalidInput("unknown class space: " + std::string(s));
}

std::vector<std::string> class_labels(ClassSpace s) {
  if (s == ClassSpace::k3Class) return {"saveme", "helpme", "others"};
  return {"saveme", "helpme", "others", "noise"};
}

CfhReport evaluate_cfh(const std::vector<DetectionEvent>& events, const std::vector<ManifestEntry>& entries,
                       ClassSpace space, long decoder_invocations) {
  if (events.size() != entries.size())
    throw InvalidInput("evaluate_cfh: " + std::to_string(events.size()) + " events for " +
                       std::to_string(entries.size()) + " manifest entries");
  CfhReport r;
  r.class_space = space;
  r.decoder_invocations = decoder_invocations;
  r.confusion = ConfusionMatrix(class_labels(space));
  const bool three = space == ClassSpace::k3Class;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const ManifestEntry& e = entries[i];
    std::string truth;
    if (e.is_speech()) {
      if (!e.cfh_class) throw InvalidInput("evaluate_cfh: speech entry without cfh_class: " + e.audio);
      truth = *e.cfh_class;
    } else {
      truth = three ? "others" : "noise";
    }
    if (events[i].error) {
      ++r.errors;
      continue;
    }
    std::string predicted(to_string(events[i].klass));
    if (three && predicted == "noise") predicted = "others";
    r.confusion.accumulate(truth, predicted);
  }
  r.total = r.confusion.total();
  if (r.total > 0) r.metrics = metrics(r.confusion);
  return r;
}

NoiseSceneReport evaluate_noise_scenes(const SpeechModel& model, const std::vector<ManifestEntry>& entries) {
  const std::vector<std::string>& scenes = model.scene_names();
  NoiseSceneReport r;
  r.confusion = ConfusionMatrix(scenes);
  for (const auto& e : entries) {
    if (e.domain && r.domain.empty()) r.domain = *e.domain;
    if (e.domain && *e.domain != r.domain) r.domain = "mixed";
    if (!e.noise_scene) {
      std::cerr << "warning: skipping entry without noise_scene: " << e.audio << '\n';
      ++r.skipped;
      continue;
    }
    const auto it = std::find(scenes.begin(), scenes.end(), *e.noise_scene);
    if (it == scenes.end()) {
      std::cerr << "warning: skipping entry with unknown scene '" << *e.noise_scene << "': " << e.audio << '\n';
      ++r.skipped;
      continue;
    }
    const Eigen::VectorXd logits = model.noise_logits(model.encode(featurize(read_wav(e.audio), model.frontend())));
    Eigen::Index best = 0;
    logits.tail(logits.size() - 1).maxCoeff(&best);
    r.confusion.accumulate(static_cast<int>(it - scenes.begin()), static_cast<int>(best));
  }
  if (r.domain.empty()) r.domain = "in-domain";
  r.total = r.confusion.total();
  r.correct = r.confusion.trace();
  r.accuracy = r.total > 0 ? static_cast<double>(r.correct) / static_cast<double>(r.total) : 0.0;
  return r;
}

json to_json(const MetricsReport& m) {
  json per_class = json::object();
  for (const auto& c : m.per_class) {
    per_class[c.label] = {{"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}, {"support", c.support}};
  }
  return json{{"accuracy", m.accuracy}, {"macro_f1", m.macro_f1}, {"per_class", per_class}};
}

namespace {

json counts_json(const CountMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

CountMatrix counts_from_json(const json& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  CountMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& row = rows.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != n) throw InvalidInput("confusion: matrix is not square");
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = row.at(static_cast<std::size_t>(j)).get<long>();
  }
  return m;
}

}  // namespace

json to_json(const CfhReport& r) {
  json j = to_json(r.metrics);
  j["class_space"] = to_string(r.class_space);
  j["labels"] = r.confusion.labels();
  j["confusion"] = counts_json(r.confusion.counts());
  j["decoder_invocations"] = r.decoder_invocations;
  j["total"] = r.total;
  j["errors"] = r.errors;
  return j;
}

CfhReport cfh_report_from_json(const json& j) {
  CfhReport r;
  r.class_space = class_space_from_string(j.at("class_space").get<std::string>());
  r.confusion = ConfusionMatrix(j.at("labels").get<std::vector<std::string>>(), counts_from_json(j.at("confusion")));
  r.metrics.accuracy = j.at("accuracy").get<double>();
  r.metrics.macro_f1 = j.at("macro_f1").get<double>();
  for (const auto& label : r.confusion.labels()) {
    const json& c = j.at("per_class").at(label);
    r.metrics.per_class.push_back({label, c.at("precision").get<double>(), c.at("recall").get<double>(),
                                   c.at("f1").get<double>(), c.at("support").get<long>()});
  }
  r.decoder_invocations = j.at("decoder_invocations").get<long>();
  r.total = j.at("total").get<long>();
  r.errors = j.value("errors", 0L);
  return r;
}

json to_json(const NoiseSceneReport& r) {
  return json{{"domain", r.domain},
              {"accuracy", r.accuracy},
              {"correct", r.correct},
              {"total", r.total},
              {"skipped", r.skipped},
              {"labels", r.confusion.labels()},
              {"confusion", counts_json(r.confusion.counts())}};
}

std::string confusion_csv(const ConfusionMatrix& cm) {
  std::ostringstream out;
  out << "true\\predicted";
  for (const auto& l : cm.labels()) out << ',' << l;
  out << '\n';
  for (Eigen::Index i = 0; i < cm.counts().rows(); ++i) {
    out << cm.labels()[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < cm.counts().cols(); ++j) out << ',' << cm.counts()(i, j);
    out << '\n';
  }
  return out.str();
}

ConfusionMatrix parse_confusion_csv(const std::string& csv) {
  std::istringstream in(csv);
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("confusion csv: empty input");
  std::vector<std::string> header = split(line);
  if (header.size() < 2) throw InvalidInput("confusion csv: header has no labels");
  std::vector<std::string> labels(header.begin() + 1, header.end());
  const auto q = static_cast<Eigen::Index>(labels.size());
  CountMatrix counts = CountMatrix::Zero(q, q);
  for (Eigen::Index i = 0; i < q; ++i) {
    if (!std::getline(in, line)) throw InvalidInput("confusion csv: missing rows");
    const std::vector<std::string> cells = split(line);
    if (static_cast<Eigen::Index>(cells.size()) != q + 1 || cells[0] != labels[static_cast<std::size_t>(i)])
      throw InvalidInput("confusion csv: malformed row " + std::to_string(i + 1));
    for (Eigen::Index j = 0; j < q; ++j) counts(i, j) = std::stol(cells[static_cast<std::size_t>(j + 1)]);
  }
  return ConfusionMatrix(std::move(labels), std::move(counts));
}

namespace {

void write_matrix(std::ostream& out, const ConfusionMatrix& cm) {
  std::size_t width = 8;
  for (const auto& l : cm.labels()) width = std::max(width, l.size() + 2);
  out << std::setw(static_cast<int>(width)) << "true\\pred";
  for (const auto& l : cm.labels()) out << std::setw(static_cast<int>(width)) << l;
  out << '\n';
  for (Eigen::Index i = 0; i < cm.counts().rows(); ++i) {
    out << std::setw(static_cast<int>(width)) << cm.labels()[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < cm.counts().cols(); ++j) out << std::setw(static_cast<int>(width)) << cm.counts()(i, j);
    out << '\n';
  }
}

}  // namespace

std::string format_table(const CfhReport& r) {
  std::ostringstream out;
  out << "call-for-help (" << to_string(r.class_space) << "), " << r.total << " clips, "
      << r.decoder_invocations << " decoder invocations";
  if (r.errors > 0) out << ", " << r.errors << " errors";
  out << '\n';
  write_matrix(out, r.confusion);
  out << std::fixed << std::setprecision(4);
  out << "accuracy " << r.metrics.accuracy << "  macro-F1 " << r.metrics.macro_f1 << '\n';
  for (const auto& c : r.metrics.per_class) {
    out << "  " << std::setw(8) << c.label << "  P " << c.precision << "  R " << c.recall << "  F1 " << c.f1
        << "  n=" << c.support << '\n';
  }
  return out.str();
}

std::string format_table(const NoiseSceneReport& r) {
  std::ostringstream out;
  out << "noise scenes (" << r.domain << "), " << r.total << " clips";
  if (r.skipped > 0) out << ", " << r.skipped << " skipped";
  out << '\n';
  write_matrix(out, r.confusion);
  out << std::fixed << std::setprecision(4) << "accuracy " << r.accuracy << '\n';
  return out.str();
}

}  // namespace cfh
