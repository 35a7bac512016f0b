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

#ifndef CFH_TRANSFORMER_HPP
#define CFH_TRANSFORMER_HPP

#include <algorithm>
#include <vector>

#include "cfh/audio.hpp"
#include "cfh/layers.hpp"
#include "cfh/model.hpp"
#include "cfh/tokenizer.hpp"

namespace cfh {

/// Encoder hidden states, one row per encoder position.
template <typename Scalar>
struct EncoderOutput {
  Mat<Scalar> states;
};

template <typename Scalar>
struct EncoderLayerCache {
  Mat<Scalar> input;
  LayerNormCache<Scalar> attn_norm;
  Mat<Scalar> attn_in;
  AttentionCache<Scalar> attn;
  Mat<Scalar> mid;
  LayerNormCache<Scalar> mlp_norm;
  Mat<Scalar> mlp_in;
  Mat<Scalar> hidden_pre;
  Mat<Scalar> hidden;
};

template <typename Scalar>
struct EncoderCache {
  Mat<Scalar> stacked;
  Mat<Scalar> stem_pre;
  std::vector<EncoderLayerCache<Scalar>> layers;
  LayerNormCache<Scalar> final_norm;
};

template <typename Scalar>
struct DecoderLayerCache {
  Mat<Scalar> input;
  LayerNormCache<Scalar> self_norm;
  Mat<Scalar> self_in;
  AttentionCache<Scalar> self_attn;
  Mat<Scalar> after_self;
  LayerNormCache<Scalar> cross_norm;
  Mat<Scalar> cross_in;
  AttentionCache<Scalar> cross_attn;
  Mat<Scalar> after_cross;
  LayerNormCache<Scalar> mlp_norm;
  Mat<Scalar> mlp_in;
  Mat<Scalar> hidden_pre;
  Mat<Scalar> hidden;
};

template <typename Scalar>
struct DecoderCache {
  TokenSequence tokens;
  std::vector<DecoderLayerCache<Scalar>> layers;
  LayerNormCache<Scalar> final_norm;
  Mat<Scalar> final_out;
};

/// Groups `stride` consecutive frames into one row; trailing frames that do not
/// fill a group are dropped.
template <typename Scalar>
Mat<Scalar> stack_frames(const Mat<Scalar>& frames, int stride) {
  const Eigen::Index rows = frames.rows() / stride;
  const Eigen::Index bins = frames.cols();
  Mat<Scalar> out(rows, bins * stride);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (int s = 0; s < stride; ++s) {
      out.block(r, s * bins, 1, bins) = frames.row(r * stride + s);
    }
  }
  return out;
}

namespace detail {

template <typename Scalar>
Mat<Scalar> mlp_forward(const Mat<Scalar>& x, const Mlp<Scalar>& m, Mat<Scalar>& hidden_pre,
                        Mat<Scalar>& hidden) {
  hidden_pre = linear(x, m.fc1);
  hidden = gelu(hidden_pre);
  return linear(hidden, m.fc2);
}

template <typename Scalar>
Mat<Scalar> mlp_backward(const Mat<Scalar>& x, const Mat<Scalar>& dy, const Mlp<Scalar>& m,
                         const Mat<Scalar>& hidden_pre, const Mat<Scalar>& hidden, Mlp<Scalar>& grad) {
  const Mat<Scalar> dhidden = linear_backward(hidden, dy, m.fc2, grad.fc2);
  return linear_backward(x, gelu_backward(hidden_pre, dhidden), m.fc1, grad.fc1);
}

}  // namespace detail

template <typename Scalar>
EncoderOutput<Scalar> encode_with_cache(const Mat<Scalar>& mel, const ModelParameters<Scalar>& p,
                                        EncoderCache<Scalar>& cache) {
  const ModelConfig& cfg = p.config;
  if (mel.cols() != cfg.n_mels() || mel.rows() != cfg.n_frames()) {
    throw InvalidInput("encode: mel shape " + std::to_string(mel.rows()) + "x" +
                       std::to_string(mel.cols()) + " does not match the model's " +
                       std::to_string(cfg.n_frames()) + "x" + std::to_string(cfg.n_mels()));
  }
  cache.stacked = stack_frames(mel, cfg.stem_stride);
  cache.stem_pre = linear(cache.stacked, p.stem);
  Mat<Scalar> x = gelu(cache.stem_pre) + sinusoidal_positions<Scalar>(cache.stacked.rows(), cfg.d_model);

  cache.layers.resize(p.encoder.size());
  for (std::size_t i = 0; i < p.encoder.size(); ++i) {
    const auto& layer = p.encoder[i];
    auto& c = cache.layers[i];
    c.input = x;
    c.attn_in = layer_norm(x, layer.attn_norm, c.attn_norm);
    c.mid = x + attention(c.attn_in, c.attn_in, layer.attn, cfg.n_heads, false, c.attn);
    c.mlp_in = layer_norm(c.mid, layer.mlp_norm, c.mlp_norm);
    x = c.mid + detail::mlp_forward(c.mlp_in, layer.mlp, c.hidden_pre, c.hidden);
  }
  return {layer_norm(x, p.encoder_norm, cache.final_norm)};
}

/// Accumulates encoder parameter gradients given d(loss)/d(states).
template <typename Scalar>
void encoder_backward(const Mat<Scalar>& dstates, const ModelParameters<Scalar>& p,
                      const EncoderCache<Scalar>& cache, ModelParameters<Scalar>& grad) {
  const ModelConfig& cfg = p.config;
  Mat<Scalar> dx = layer_norm_backward(dstates, p.encoder_norm, cache.final_norm, grad.encoder_norm);
  for (std::size_t ii = p.encoder.size(); ii-- > 0;) {
    const auto& layer = p.encoder[ii];
    const auto& c = cache.layers[ii];
    auto& g = grad.encoder[ii];
    const Mat<Scalar> dmlp_in = detail::mlp_backward(c.mlp_in, dx, layer.mlp, c.hidden_pre, c.hidden, g.mlp);
    Mat<Scalar> dmid = dx + layer_norm_backward(dmlp_in, layer.mlp_norm, c.mlp_norm, g.mlp_norm);
    Mat<Scalar> dattn_in = Mat<Scalar>::Zero(c.attn_in.rows(), c.attn_in.cols());
    const Mat<Scalar> dquery = attention_backward(c.attn_in, c.attn_in, dmid, layer.attn, cfg.n_heads, c.attn, g.attn, dattn_in);
    dattn_in += dquery;
    dx = dmid + layer_norm_backward(dattn_in, layer.attn_norm, c.attn_norm, g.attn_norm);
  }
  const Mat<Scalar> dstem_pre = gelu_backward(cache.stem_pre, dx);
  linear_backward(cache.stacked, dstem_pre, p.stem, grad.stem);
}

template <typename Scalar>
EncoderOutput<Scalar> encode(const Mat<Scalar>& mel, const ModelParameters<Scalar>& p) {
  EncoderCache<Scalar> cache;
  return encode_with_cache(mel, p, cache);
}

template <typename Scalar>
EncoderOutput<Scalar> encode(const MelSpectrogram& mel, const ModelParameters<Scalar>& p) {
  return encode<Scalar>(mel.frames.cast<Scalar>().eval(), p);
}

/// Column means over encoder positions.
template <typename Scalar>
Vec<Scalar> mean_pool_time(const EncoderOutput<Scalar>& e) {
  if (e.states.rows() < 1) throw InvalidInput("mean_pool_time: no encoder positions");
  return e.states.colwise().mean().transpose();
}

/// Affine map of the pooled encoder state to K + 1 logits; index 0 is speech.
template <typename Scalar>
Vec<Scalar> noise_head(const Vec<Scalar>& pooled, const ModelParameters<Scalar>& p) {
  if (pooled.size() != p.noise_head.weight.rows())
    throw InvalidInput("noise_head: pooled vector has the wrong width");
  return p.noise_head.weight.transpose() * pooled + p.noise_head.bias.row(0).transpose();
}

template <typename Scalar>
Mat<Scalar> decoder_forward_with_cache(const TokenSequence& tokens, const EncoderOutput<Scalar>& e,
                                       const ModelParameters<Scalar>& p, DecoderCache<Scalar>& cache) {
  const ModelConfig& cfg = p.config;
  if (tokens.empty()) throw InvalidInput("decoder_forward: empty target sequence");
  if (tokens.front() != kSot) throw InvalidInput("decoder_forward: targets must begin with sot");
  if (static_cast<int>(tokens.size()) > cfg.max_target_len)
    throw InvalidInput("decoder_forward: target sequence longer than max_target_len");
  for (const int t : tokens) {
    if (t < 0 || t >= cfg.vocab_size()) throw InvalidInput("decoder_forward: token id out of range");
  }
  if (e.states.cols() != cfg.d_model || e.states.rows() < 1)
    throw InvalidInput("decoder_forward: encoder output has the wrong shape");

  const auto n = static_cast<Eigen::Index>(tokens.size());
  cache.tokens = tokens;
  Mat<Scalar> x(n, cfg.d_model);
  for (Eigen::Index i = 0; i < n; ++i) x.row(i) = p.token_embedding.row(tokens[static_cast<std::size_t>(i)]);
  x += sinusoidal_positions<Scalar>(n, cfg.d_model);

  cache.layers.resize(p.decoder.size());
  for (std::size_t i = 0; i < p.decoder.size(); ++i) {
    const auto& layer = p.decoder[i];
    auto& c = cache.layers[i];
    c.input = x;
    c.self_in = layer_norm(x, layer.self_norm, c.self_norm);
    c.after_self = x + attention(c.self_in, c.self_in, layer.self_attn, cfg.n_heads, true, c.self_attn);
    c.cross_in = layer_norm(c.after_self, layer.cross_norm, c.cross_norm);
    c.after_cross = c.after_self + attention(c.cross_in, e.states, layer.cross_attn, cfg.n_heads, false, c.cross_attn);
    c.mlp_in = layer_norm(c.after_cross, layer.mlp_norm, c.mlp_norm);
    x = c.after_cross + detail::mlp_forward(c.mlp_in, layer.mlp, c.hidden_pre, c.hidden);
  }
  cache.final_out = layer_norm(x, p.decoder_norm, cache.final_norm);
  return linear(cache.final_out, p.asr_proj);
}

/// Teacher-forced logits, one row per input token. Row t depends only on
/// tokens[0..t] and the encoder states.
template <typename Scalar>
Mat<Scalar> decoder_forward(const TokenSequence& tokens, const EncoderOutput<Scalar>& e,
                            const ModelParameters<Scalar>& p) {
  DecoderCache<Scalar> cache;
  return decoder_forward_with_cache(tokens, e, p, cache);
}

/// Accumulates decoder parameter gradients; returns d(loss)/d(encoder states).
template <typename Scalar>
Mat<Scalar> decoder_backward(const Mat<Scalar>& dlogits, const EncoderOutput<Scalar>& e,
                             const ModelParameters<Scalar>& p, const DecoderCache<Scalar>& cache,
                             ModelParameters<Scalar>& grad) {
  const ModelConfig& cfg = p.config;
  Mat<Scalar> denc = Mat<Scalar>::Zero(e.states.rows(), e.states.cols());
  const Mat<Scalar> dfinal = linear_backward(cache.final_out, dlogits, p.asr_proj, grad.asr_proj);
  Mat<Scalar> dx = layer_norm_backward(dfinal, p.decoder_norm, cache.final_norm, grad.decoder_norm);
  for (std::size_t ii = p.decoder.size(); ii-- > 0;) {
    const auto& layer = p.decoder[ii];
    const auto& c = cache.layers[ii];
    auto& g = grad.decoder[ii];
    const Mat<Scalar> dmlp_in = detail::mlp_backward(c.mlp_in, dx, layer.mlp, c.hidden_pre, c.hidden, g.mlp);
    const Mat<Scalar> dafter_cross = dx + layer_norm_backward(dmlp_in, layer.mlp_norm, c.mlp_norm, g.mlp_norm);
    const Mat<Scalar> dcross_in = attention_backward(c.cross_in, e.states, dafter_cross, layer.cross_attn,
                                                     cfg.n_heads, c.cross_attn, g.cross_attn, denc);
    const Mat<Scalar> dafter_self =
        dafter_cross + layer_norm_backward(dcross_in, layer.cross_norm, c.cross_norm, g.cross_norm);
    Mat<Scalar> dself_in = Mat<Scalar>::Zero(c.self_in.rows(), c.self_in.cols());
    const Mat<Scalar> dquery = attention_backward(c.self_in, c.self_in, dafter_self, layer.self_attn,
                                                  cfg.n_heads, c.self_attn, g.self_attn, dself_in);
    dself_in += dquery;
    dx = dafter_self + layer_norm_backward(dself_in, layer.self_norm, c.self_norm, g.self_norm);
  }
  for (std::size_t i = 0; i < cache.tokens.size(); ++i) {
    grad.token_embedding.row(cache.tokens[i]) += dx.row(static_cast<Eigen::Index>(i));
  }
  return denc;
}

/// Greedy autoregressive decoding. The result excludes sot and ends with eot
/// when one was produced; otherwise it has exactly max_len tokens.
template <typename Scalar>
TokenSequence greedy_decode(const EncoderOutput<Scalar>& e, const ModelParameters<Scalar>& p, int max_len) {
  if (max_len < 1) throw InvalidInput("greedy_decode: max_len must be >= 1");
  // The decoder input (sot + output so far) may not exceed max_target_len.
  const int cap = std::min(max_len, p.config.max_target_len);
  TokenSequence input{kSot};
  TokenSequence out;
  while (static_cast<int>(out.size()) < cap) {
    const Mat<Scalar> logits = decoder_forward(input, e, p);
    Eigen::Index best = 0;
    logits.row(logits.rows() - 1).maxCoeff(&best);
    const int token = static_cast<int>(best);
    out.push_back(token);
    if (token == kEot) break;
    input.push_back(token);
  }
  return out;
}

}  // namespace cfh

#endif  // CFH_TRANSFORMER_HPP
