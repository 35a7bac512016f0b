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

#ifndef CFH_MODEL_HPP
#define CFH_MODEL_HPP

#include <cmath>
#include <cstring>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cfh/common.hpp"
#include "cfh/model_config.hpp"

namespace cfh {

// Weights are (in x out) so a layer maps row-major activations as x * W + b.
// Biases and norm parameters are stored as 1 x n matrices.
template <typename Scalar>
struct Linear {
  Mat<Scalar> weight;
  Mat<Scalar> bias;
};

template <typename Scalar>
struct LayerNorm {
  Mat<Scalar> gamma;
  Mat<Scalar> beta;
};

template <typename Scalar>
struct Attention {
  Linear<Scalar> query, key, value, out;
};

template <typename Scalar>
struct Mlp {
  Linear<Scalar> fc1, fc2;
};

template <typename Scalar>
struct EncoderLayer {
  LayerNorm<Scalar> attn_norm;
  Attention<Scalar> attn;
  LayerNorm<Scalar> mlp_norm;
  Mlp<Scalar> mlp;
};

template <typename Scalar>
struct DecoderLayer {
  LayerNorm<Scalar> self_norm;
  Attention<Scalar> self_attn;
  LayerNorm<Scalar> cross_norm;
  Attention<Scalar> cross_attn;
  LayerNorm<Scalar> mlp_norm;
  Mlp<Scalar> mlp;
};

/// Every learnable tensor of the encoder-decoder plus the noise head. Gradients
/// and optimizer moments reuse the same layout.
template <typename Scalar>
struct ModelParameters {
  ModelConfig config;

  Linear<Scalar> stem;
  std::vector<EncoderLayer<Scalar>> encoder;
  LayerNorm<Scalar> encoder_norm;

  Mat<Scalar> token_embedding;  // vocab x d_model
  std::vector<DecoderLayer<Scalar>> decoder;
  LayerNorm<Scalar> decoder_norm;
  Linear<Scalar> asr_proj;  // d_model -> vocab

  Linear<Scalar> noise_head;  // d_model -> K + 1
};

namespace detail {

template <typename L, typename F>
void visit_linear(const std::string& name, L& l, F& f) {
  f(name + ".weight", l.weight);
  f(name + ".bias", l.bias);
}

template <typename N, typename F>
void visit_norm(const std::string& name, N& n, F& f) {
  f(name + ".gamma", n.gamma);
  f(name + ".beta", n.beta);
}

template <typename A, typename F>
void visit_attention(const std::string& name, A& a, F& f) {
  visit_linear(name + ".query", a.query, f);
  visit_linear(name + ".key", a.key, f);
  visit_linear(name + ".value", a.value, f);
  visit_linear(name + ".out", a.out, f);
}

template <typename M, typename F>
void visit_mlp(const std::string& name, M& m, F& f) {
  visit_linear(name + ".fc1", m.fc1, f);
  visit_linear(name + ".fc2", m.fc2, f);
}

}  // namespace detail

/// Calls f(name, tensor) for every tensor in a fixed order. Works on const and
/// non-const parameter sets.
template <typename Params, typename F>
void for_each_tensor(Params& p, F&& f) {
  using detail::visit_attention;
  using detail::visit_linear;
  using detail::visit_mlp;
  using detail::visit_norm;
  visit_linear("stem", p.stem, f);
  for (std::size_t i = 0; i < p.encoder.size(); ++i) {
    auto& layer = p.encoder[i];
    const std::string n = "encoder." + std::to_string(i);
    visit_norm(n + ".attn_norm", layer.attn_norm, f);
    visit_attention(n + ".attn", layer.attn, f);
    visit_norm(n + ".mlp_norm", layer.mlp_norm, f);
    visit_mlp(n + ".mlp", layer.mlp, f);
  }
  visit_norm("encoder_norm", p.encoder_norm, f);
  f(std::string("token_embedding"), p.token_embedding);
  for (std::size_t i = 0; i < p.decoder.size(); ++i) {
    auto& layer = p.decoder[i];
    const std::string n = "decoder." + std::to_string(i);
    visit_norm(n + ".self_norm", layer.self_norm, f);
    visit_attention(n + ".self_attn", layer.self_attn, f);
    visit_norm(n + ".cross_norm", layer.cross_norm, f);
    visit_attention(n + ".cross_attn", layer.cross_attn, f);
    visit_norm(n + ".mlp_norm", layer.mlp_norm, f);
    visit_mlp(n + ".mlp", layer.mlp, f);
  }
  visit_norm("decoder_norm", p.decoder_norm, f);
  visit_linear("asr_proj", p.asr_proj, f);
  visit_linear("noise_head", p.noise_head, f);
}

template <typename Params>
auto tensor_list(Params& p) {
  using M = std::remove_reference_t<decltype((p.token_embedding))>;
  std::vector<std::pair<std::string, M*>> out;
  for_each_tensor(p, [&](const std::string& name, M& t) { out.emplace_back(name, &t); });
  return out;
}

/// Applies f(a_tensor, b_tensor) pairwise over two parameter sets of the same
/// config.
template <typename PA, typename PB, typename F>
void zip_tensors(PA& a, PB& b, F&& f) {
  auto la = tensor_list(a);
  auto lb = tensor_list(b);
  if (la.size() != lb.size()) throw InvalidInput("parameter sets have different layouts");
  for (std::size_t i = 0; i < la.size(); ++i) f(*la[i].second, *lb[i].second);
}

/// All-zero parameters with the shapes implied by `cfg`.
template <typename Scalar>
ModelParameters<Scalar> zero_parameters(const ModelConfig& cfg) {
  cfg.validate();
  const int d = cfg.d_model;
  const int hidden = d * cfg.mlp_ratio;
  auto linear = [](int in, int out) {
    return Linear<Scalar>{Mat<Scalar>::Zero(in, out), Mat<Scalar>::Zero(1, out)};
  };
  auto norm = [d] { return LayerNorm<Scalar>{Mat<Scalar>::Zero(1, d), Mat<Scalar>::Zero(1, d)}; };
  auto attention = [&] {
    return Attention<Scalar>{linear(d, d), linear(d, d), linear(d, d), linear(d, d)};
  };
  auto mlp = [&] { return Mlp<Scalar>{linear(d, hidden), linear(hidden, d)}; };

  ModelParameters<Scalar> p;
  p.config = cfg;
  p.stem = linear(cfg.stem_stride * cfg.n_mels(), d);
  for (int i = 0; i < cfg.n_enc_layers; ++i) {
    p.encoder.push_back({norm(), attention(), norm(), mlp()});
  }
  p.encoder_norm = norm();
  p.token_embedding = Mat<Scalar>::Zero(cfg.vocab_size(), d);
  for (int i = 0; i < cfg.n_dec_layers; ++i) {
    p.decoder.push_back({norm(), attention(), norm(), attention(), norm(), mlp()});
  }
  p.decoder_norm = norm();
  p.asr_proj = linear(d, cfg.vocab_size());
  p.noise_head = linear(d, cfg.n_noise_classes() + 1);
  return p;
}

inline bool is_bias_name(const std::string& name) {
  return name.ends_with(".bias") || name.ends_with(".beta");
}

inline bool is_gain_name(const std::string& name) { return name.ends_with(".gamma"); }

/// Deterministic initialization: weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)),
/// biases zero, norm gains one. The embedding uses fan_in = d_model.
template <typename Scalar>
ModelParameters<Scalar> init_parameters(const ModelConfig& cfg, std::uint64_t seed) {
  ModelParameters<Scalar> p = zero_parameters<Scalar>(cfg);
  std::mt19937_64 rng(seed);
  for_each_tensor(p, [&](const std::string& name, Mat<Scalar>& t) {
    if (is_bias_name(name)) return;
    if (is_gain_name(name)) {
      t.setOnes();
      return;
    }
    const double fan_in = name == "token_embedding" ? t.cols() : t.rows();
    std::uniform_real_distribution<double> dist(-1.0 / std::sqrt(fan_in), 1.0 / std::sqrt(fan_in));
    for (Eigen::Index j = 0; j < t.cols(); ++j) {
      for (Eigen::Index i = 0; i < t.rows(); ++i) t(i, j) = static_cast<Scalar>(dist(rng));
    }
  });
  return p;
}

template <typename To, typename From>
ModelParameters<To> cast_parameters(const ModelParameters<From>& src) {
  ModelParameters<To> out = zero_parameters<To>(src.config);
  zip_tensors(out, src, [](Mat<To>& dst, const Mat<From>& s) { dst = s.template cast<To>(); });
  return out;
}

template <typename Scalar>
void set_zero(ModelParameters<Scalar>& p) {
  for_each_tensor(p, [](const std::string&, Mat<Scalar>& t) { t.setZero(); });
}

template <typename Scalar>
bool all_finite(const ModelParameters<Scalar>& p) {
  bool ok = true;
  for_each_tensor(p, [&](const std::string&, const Mat<Scalar>& t) { ok = ok && t.allFinite(); });
  return ok;
}

template <typename Scalar>
long parameter_count(const ModelParameters<Scalar>& p) {
  long n = 0;
  for_each_tensor(p, [&](const std::string&, const Mat<Scalar>& t) { n += t.size(); });
  return n;
}

/// Bitwise equality of every tensor.
template <typename Scalar>
bool identical(const ModelParameters<Scalar>& a, const ModelParameters<Scalar>& b) {
  bool same = true;
  zip_tensors(a, b, [&](const Mat<Scalar>& x, const Mat<Scalar>& y) {
    same = same && x.rows() == y.rows() && x.cols() == y.cols() &&
           std::memcmp(x.data(), y.data(), sizeof(Scalar) * x.size()) == 0;
  });
  return same;
}

}  // namespace cfh

#endif  // CFH_MODEL_HPP
