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

#ifndef CFH_LOSSES_HPP
#define CFH_LOSSES_HPP

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "cfh/transformer.hpp"

namespace cfh {

template <typename Scalar>
Vec<Scalar> softmax(const Vec<Scalar>& logits) {
  const Scalar mx = logits.maxCoeff();
  Vec<Scalar> e = (logits.array() - mx).exp();
  return e / e.sum();
}

/// Cross-entropy of one logit vector: -log softmax(logits)[label].
template <typename Scalar>
Scalar cross_entropy(const Eigen::Ref<const Vec<Scalar>>& logits, int label) {
  const Scalar mx = logits.maxCoeff();
  const Scalar sum = (logits.array() - mx).exp().sum();
  // Both terms are non-negative, so the loss is too.
  return (mx - logits[label]) + std::log(sum);
}

/// Noise-classification loss for K + 1 logits.
template <typename Scalar>
Scalar noise_loss(const Vec<Scalar>& logits, int label) {
  if (label < 0 || label >= logits.size()) throw InvalidInput("noise_loss: label out of range");
  return cross_entropy<Scalar>(logits, label);
}

/// Mean per-token cross-entropy over unmasked positions (mask true = counted).
template <typename Scalar>
Scalar seq2seq_loss(const Mat<Scalar>& logit_rows, const TokenSequence& targets_out,
                    const std::vector<bool>& mask) {
  if (logit_rows.rows() != static_cast<Eigen::Index>(targets_out.size()) ||
      targets_out.size() != mask.size()) {
    throw InvalidInput("seq2seq_loss: logits, targets and mask lengths differ");
  }
  Scalar total(0);
  long counted = 0;
  for (std::size_t t = 0; t < targets_out.size(); ++t) {
    if (!mask[t]) continue;
    const int y = targets_out[t];
    if (y < 0 || y >= logit_rows.cols()) throw InvalidInput("seq2seq_loss: target id out of range");
    const Vec<Scalar> row = logit_rows.row(static_cast<Eigen::Index>(t)).transpose();
    total += cross_entropy<Scalar>(row, y);
    ++counted;
  }
  if (counted == 0) throw InvalidInput("seq2seq_loss: every position is masked");
  return total / static_cast<Scalar>(counted);
}

/// One training item. noise_label 0 is speech (with a transcript); 1..K are
/// noise scenes without one. `target_tokens` holds transcript characters only.
struct TrainingExample {
  Eigen::MatrixXf mel;
  int noise_label = 0;
  std::optional<TokenSequence> target_tokens;

  bool has_transcript() const { return target_tokens.has_value() && noise_label == 0; }
  void validate() const {
    if (noise_label < 0) throw InvalidInput("training example: negative noise label");
    if (noise_label == 0 && !target_tokens)
      throw InvalidInput("training example: speech example without a transcript");
    if (noise_label > 0 && target_tokens && !target_tokens->empty())
      throw InvalidInput("training example: noise example with a transcript");
  }
};

/// Decoder input: sot followed by the transcript.
inline TokenSequence teacher_input(const TokenSequence& transcript) {
  TokenSequence in{kSot};
  in.insert(in.end(), transcript.begin(), transcript.end());
  return in;
}

/// Decoder target: the transcript followed by eot.
inline TokenSequence teacher_output(const TokenSequence& transcript) {
  TokenSequence out(transcript);
  out.push_back(kEot);
  return out;
}

struct LossBreakdown {
  double l_noise = 0.0;
  double l_seq2seq = 0.0;
  double l_multi = 0.0;
};

/// Batch loss: l_noise is the mean noise cross-entropy over every item,
/// l_seq2seq the mean per-item token loss over items with transcripts, and
/// l_multi = l_noise + l_seq2seq.
///
/// When `grad` is given, gradients of noise_weight * l_noise + l_seq2seq are
/// accumulated into it. noise_weight 0 gives the single-task objective.
template <typename Scalar>
LossBreakdown multitask_loss(const ModelParameters<Scalar>& p, std::span<const TrainingExample> batch,
                             ModelParameters<Scalar>* grad = nullptr, double noise_weight = 1.0) {
  if (batch.empty()) throw InvalidInput("multitask_loss: empty batch");
  long n_speech = 0;
  for (const auto& ex : batch) {
    ex.validate();
    if (ex.noise_label > p.config.n_noise_classes())
      throw InvalidInput("multitask_loss: noise label exceeds the model's scene count");
    if (ex.has_transcript()) ++n_speech;
  }
  const auto batch_size = static_cast<double>(batch.size());

  double noise_sum = 0.0;
  double seq_sum = 0.0;
  for (const auto& ex : batch) {
    const bool speech = ex.has_transcript();
    const bool need_encoder_grad = grad != nullptr && (noise_weight != 0.0 || speech);

    EncoderCache<Scalar> enc_cache;
    const EncoderOutput<Scalar> enc = encode_with_cache<Scalar>(ex.mel.cast<Scalar>().eval(), p, enc_cache);
    const Vec<Scalar> pooled = mean_pool_time(enc);
    const Vec<Scalar> logits = noise_head(pooled, p);
    noise_sum += static_cast<double>(noise_loss(logits, ex.noise_label));

    Mat<Scalar> dstates;
    if (need_encoder_grad) dstates = Mat<Scalar>::Zero(enc.states.rows(), enc.states.cols());

    if (grad != nullptr && noise_weight != 0.0) {
      Vec<Scalar> dlogits = softmax(logits);
      dlogits[ex.noise_label] -= Scalar(1);
      dlogits *= static_cast<Scalar>(noise_weight / batch_size);
      grad->noise_head.weight.noalias() += pooled * dlogits.transpose();
      grad->noise_head.bias += dlogits.transpose();
      const Vec<Scalar> dpooled = p.noise_head.weight * dlogits;
      dstates.rowwise() += (dpooled / static_cast<Scalar>(enc.states.rows())).transpose();
    }

    if (speech) {
      const TokenSequence in = teacher_input(*ex.target_tokens);
      const TokenSequence out = teacher_output(*ex.target_tokens);
      DecoderCache<Scalar> dec_cache;
      const Mat<Scalar> logit_rows = decoder_forward_with_cache(in, enc, p, dec_cache);
      seq_sum += static_cast<double>(seq2seq_loss(logit_rows, out, std::vector<bool>(out.size(), true)));
      if (grad != nullptr) {
        Mat<Scalar> dlog(logit_rows.rows(), logit_rows.cols());
        for (Eigen::Index t = 0; t < logit_rows.rows(); ++t) {
          dlog.row(t) = softmax<Scalar>(logit_rows.row(t).transpose()).transpose();
          dlog(t, out[static_cast<std::size_t>(t)]) -= Scalar(1);
        }
        dlog *= static_cast<Scalar>(1.0 / (static_cast<double>(logit_rows.rows()) * n_speech));
        dstates += decoder_backward(dlog, enc, p, dec_cache, *grad);
      }
    }

    if (need_encoder_grad) encoder_backward(dstates, p, enc_cache, *grad);
  }

  LossBreakdown out;
  out.l_noise = noise_sum / batch_size;
  out.l_seq2seq = n_speech > 0 ? seq_sum / static_cast<double>(n_speech) : 0.0;
  out.l_multi = out.l_noise + out.l_seq2seq;
  return out;
}

}  // namespace cfh

#endif  // CFH_LOSSES_HPP
