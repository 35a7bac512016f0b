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

#ifndef CFH_OPTIM_HPP
#define CFH_OPTIM_HPP

#include <cmath>
#include <cstdint>
#include <numbers>

#include "cfh/model.hpp"

namespace cfh {

/// base_lr * 0.5 * (1 + cos(pi * step / total_steps)); steps past the horizon
/// clamp to the final value.
inline double cosine_lr(long step, long total_steps, double base_lr) {
  if (total_steps <= 0) throw InvalidInput("cosine_lr: total_steps must be positive");
  if (step < 0) throw InvalidInput("cosine_lr: negative step");
  if (step >= total_steps) return 0.0;
  const double progress = static_cast<double>(step) / static_cast<double>(total_steps);
  return base_lr * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

struct AdamWConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
};

template <typename Scalar>
struct OptimizerState {
  ModelParameters<Scalar> first_moment;
  ModelParameters<Scalar> second_moment;
  long step = 0;

  explicit OptimizerState(const ModelConfig& cfg)
      : first_moment(zero_parameters<Scalar>(cfg)), second_moment(zero_parameters<Scalar>(cfg)) {}
};

/// Decoupled weight decay Adam. Throws TrainingDiverged on a non-finite
/// gradient before touching any parameter.
template <typename Scalar>
void adamw_step(ModelParameters<Scalar>& params, const ModelParameters<Scalar>& grads,
                OptimizerState<Scalar>& state, double lr, const AdamWConfig& cfg = {}) {
  if (lr < 0.0) throw InvalidInput("adamw_step: negative learning rate");
  if (!all_finite(grads)) throw TrainingDiverged("adamw_step: non-finite gradient");

  state.step += 1;
  const double bias1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bias2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  auto p = tensor_list(params);
  auto g = tensor_list(grads);
  auto m = tensor_list(state.first_moment);
  auto v = tensor_list(state.second_moment);
  const Scalar b1(cfg.beta1), b2(cfg.beta2);
  const Scalar decay = static_cast<Scalar>(1.0 - lr * cfg.weight_decay);
  const Scalar step_size = static_cast<Scalar>(lr / bias1);
  const Scalar inv_sqrt_bias2 = static_cast<Scalar>(1.0 / std::sqrt(bias2));
  const Scalar eps(cfg.eps);
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto& theta = *p[i].second;
    const auto& grad = *g[i].second;
    auto& m1 = *m[i].second;
    auto& m2 = *v[i].second;
    m1 = b1 * m1 + (Scalar(1) - b1) * grad;
    m2 = b2 * m2 + (Scalar(1) - b2) * grad.cwiseProduct(grad);
    if (lr == 0.0) continue;
    theta *= decay;
    theta.array() -= step_size * m1.array() / (m2.array().sqrt() * inv_sqrt_bias2 + eps);
  }
}

/// Exponential moving average of the parameters:
/// shadow <- c * shadow + (1 - c) * params.
template <typename Scalar>
struct EmaState {
  ModelParameters<Scalar> shadow;
  double coefficient = 0.5;
};

template <typename Scalar>
void ema_update(const ModelParameters<Scalar>& params, EmaState<Scalar>& ema) {
  const Scalar keep(ema.coefficient);
  const Scalar take(1.0 - ema.coefficient);
  zip_tensors(ema.shadow, params, [&](Mat<Scalar>& s, const Mat<Scalar>& x) {
    if (s.rows() != x.rows() || s.cols() != x.cols()) throw InvalidInput("ema_update: shape mismatch");
    s = keep * s + take * x;
  });
}

}  // namespace cfh

#endif  // CFH_OPTIM_HPP
