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

#ifndef CFH_GRADCHECK_HPP
#define CFH_GRADCHECK_HPP

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "cfh/model.hpp"

namespace cfh {

/// Central difference (f(x + h) - f(x - h)) / 2h.
template <typename F>
double central_difference(F&& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Coarse grouping of tensors for sampling: layer indices and the trailing
/// component are dropped, so "decoder.1.cross_attn.key.weight" falls in
/// "decoder.cross_attn".
inline std::string tensor_class(const std::string& name) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= name.size()) {
    const std::size_t dot = name.find('.', start);
    parts.push_back(name.substr(start, dot == std::string::npos ? std::string::npos : dot - start));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  std::string out = parts[0];
  if (parts.size() >= 3 && !parts[1].empty() && std::isdigit(static_cast<unsigned char>(parts[1][0]))) {
    out += "." + parts[2];
  }
  return out;
}

struct GradcheckOptions {
  double epsilon = 3e-4;
  /// Step is epsilon * max(|theta|, step_floor).
  double step_floor = 0.1;
  double tolerance = 1e-4;
  /// Pairs with |analytic| and |numeric| both below this count as agreeing.
  double abs_floor = 1e-6;
  int samples_per_class = 200;
  std::uint64_t seed = 0;
};

struct GradcheckReport {
  double max_rel_error = 0.0;
  std::string worst_tensor;
  long coordinates = 0;
  std::map<std::string, double> class_max_error;
  std::map<std::string, long> class_coordinates;
  bool passed = false;
};

/// Compares the analytic gradient from `loss(params, &grad)` with central
/// differences of `loss(params, nullptr)` on a random sample of coordinates
/// from every tensor class.
template <typename LossFn>
GradcheckReport gradcheck(LossFn&& loss, ModelParameters<double> params, const GradcheckOptions& opt) {
  if (!(opt.epsilon > 0.0)) throw InvalidInput("gradcheck: epsilon must be positive");

  ModelParameters<double> grad = zero_parameters<double>(params.config);
  loss(params, &grad);

  struct Coord {
    Mat<double>* param;
    const Mat<double>* grad;
    Eigen::Index index;
    std::string tensor;
  };
  std::map<std::string, std::vector<Coord>> classes;
  auto plist = tensor_list(params);
  auto glist = tensor_list(grad);
  for (std::size_t i = 0; i < plist.size(); ++i) {
    auto& pool = classes[tensor_class(plist[i].first)];
    for (Eigen::Index k = 0; k < plist[i].second->size(); ++k) {
      pool.push_back({plist[i].second, glist[i].second, k, plist[i].first});
    }
  }

  std::mt19937_64 rng(opt.seed);
  GradcheckReport report;
  for (auto& [cls, pool] : classes) {
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t n = std::min<std::size_t>(order.size(), static_cast<std::size_t>(opt.samples_per_class));
    double class_max = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      const Coord& c = pool[order[s]];
      double& theta = c.param->data()[c.index];
      const double saved = theta;
      const double h = opt.epsilon * std::max(std::abs(saved), opt.step_floor);
      theta = saved + h;
      const double up = loss(params, nullptr);
      theta = saved - h;
      const double down = loss(params, nullptr);
      theta = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double analytic = c.grad->data()[c.index];
      const double scale = std::max({std::abs(numeric), std::abs(analytic), opt.abs_floor});
      const double rel = std::abs(numeric - analytic) / scale;
      class_max = std::max(class_max, rel);
      if (rel >= report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst_tensor = c.tensor;
      }
    }
    report.class_max_error[cls] = class_max;
    report.class_coordinates[cls] = static_cast<long>(n);
    report.coordinates += static_cast<long>(n);
  }
  report.passed = report.max_rel_error <= opt.tolerance;
  return report;
}

struct GradcheckSuite {
  /// Keyed by loss path: "noise", "seq2seq", "multitask".
  std::map<std::string, GradcheckReport> paths;
  double max_rel_error = 0.0;
  bool passed = false;
};

/// Gradchecks the three loss paths on seeded random features and tokens, with
/// the initial parameters jittered so that biases and gains are off their
/// init values.
GradcheckSuite gradcheck_suite(const ModelConfig& cfg, const GradcheckOptions& opt);

}  // namespace cfh

#endif  // CFH_GRADCHECK_HPP
