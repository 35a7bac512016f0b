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

#ifndef CFH_LAYERS_HPP
#define CFH_LAYERS_HPP

#include <cmath>
#include <numbers>
#include <vector>

#include "cfh/model.hpp"

// Forward and backward passes of the transformer building blocks. Activations
// are (positions x features). Backward functions accumulate parameter
// gradients into a same-shaped struct and return the input gradient.

namespace cfh {

template <typename Scalar>
Mat<Scalar> linear(const Mat<Scalar>& x, const Linear<Scalar>& l) {
  Mat<Scalar> y = x * l.weight;
  y.rowwise() += l.bias.row(0);
  return y;
}

template <typename Scalar>
Mat<Scalar> linear_backward(const Mat<Scalar>& x, const Mat<Scalar>& dy, const Linear<Scalar>& l,
                            Linear<Scalar>& grad) {
  grad.weight.noalias() += x.transpose() * dy;
  grad.bias += dy.colwise().sum();
  return dy * l.weight.transpose();
}

inline constexpr double kLayerNormEps = 1e-5;

template <typename Scalar>
struct LayerNormCache {
  Mat<Scalar> normalized;
  Vec<Scalar> inv_std;
};

template <typename Scalar>
Mat<Scalar> layer_norm(const Mat<Scalar>& x, const LayerNorm<Scalar>& ln, LayerNormCache<Scalar>& cache) {
  const Vec<Scalar> mean = x.rowwise().mean();
  Mat<Scalar> centered = x.colwise() - mean;
  const Vec<Scalar> var = centered.array().square().rowwise().mean();
  cache.inv_std = (var.array() + Scalar(kLayerNormEps)).rsqrt();
  cache.normalized = cache.inv_std.asDiagonal() * centered;
  Mat<Scalar> y = cache.normalized * ln.gamma.row(0).asDiagonal();
  y.rowwise() += ln.beta.row(0);
  return y;
}

template <typename Scalar>
Mat<Scalar> layer_norm_backward(const Mat<Scalar>& dy, const LayerNorm<Scalar>& ln,
                                const LayerNormCache<Scalar>& cache, LayerNorm<Scalar>& grad) {
  grad.gamma += (dy.array() * cache.normalized.array()).colwise().sum().matrix();
  grad.beta += dy.colwise().sum();
  const Mat<Scalar> dxhat = dy * ln.gamma.row(0).asDiagonal();
  const Vec<Scalar> mean_d = dxhat.rowwise().mean();
  const Vec<Scalar> mean_dx = (dxhat.array() * cache.normalized.array()).rowwise().mean();
  Mat<Scalar> dx = dxhat.colwise() - mean_d;
  dx -= cache.normalized.cwiseProduct(mean_dx.replicate(1, dx.cols()));
  return cache.inv_std.asDiagonal() * dx;
}

namespace detail {
inline constexpr double kGeluC = 0.7978845608028654;  // sqrt(2 / pi)
inline constexpr double kGeluA = 0.044715;
}  // namespace detail

/// tanh approximation of GELU.
template <typename Scalar>
Mat<Scalar> gelu(const Mat<Scalar>& x) {
  const Scalar c(detail::kGeluC), a(detail::kGeluA);
  return x.unaryExpr([c, a](Scalar v) {
    return Scalar(0.5) * v * (Scalar(1) + std::tanh(c * (v + a * v * v * v)));
  });
}

template <typename Scalar>
Mat<Scalar> gelu_backward(const Mat<Scalar>& x, const Mat<Scalar>& dy) {
  const Scalar c(detail::kGeluC), a(detail::kGeluA);
  const Mat<Scalar> slope = x.unaryExpr([c, a](Scalar v) {
    const Scalar t = std::tanh(c * (v + a * v * v * v));
    return Scalar(0.5) * (Scalar(1) + t) +
           Scalar(0.5) * v * (Scalar(1) - t * t) * c * (Scalar(1) + Scalar(3) * a * v * v);
  });
  return dy.cwiseProduct(slope);
}

/// Row-wise softmax restricted to the first `width(i)` columns of row i; the
/// remaining entries are exactly zero.
template <typename Scalar, typename WidthFn>
void softmax_rows_inplace(Mat<Scalar>& s, WidthFn width) {
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    const Eigen::Index w = width(i);
    auto row = s.row(i);
    const Scalar mx = row.head(w).maxCoeff();
    row.head(w) = (row.head(w).array() - mx).exp();
    row.head(w) /= row.head(w).sum();
    row.tail(s.cols() - w).setZero();
  }
}

template <typename Scalar>
struct AttentionCache {
  Mat<Scalar> q, k, v, merged;
  std::vector<Mat<Scalar>> probs;
};

/// Multi-head scaled dot-product attention of queries `xq` over `xkv`. With
/// `causal`, query i only sees keys 0..i.
template <typename Scalar>
Mat<Scalar> attention(const Mat<Scalar>& xq, const Mat<Scalar>& xkv, const Attention<Scalar>& a,
                      int n_heads, bool causal, AttentionCache<Scalar>& cache) {
  cache.q = linear(xq, a.query);
  cache.k = linear(xkv, a.key);
  cache.v = linear(xkv, a.value);
  const Eigen::Index d = cache.q.cols();
  const Eigen::Index dh = d / n_heads;
  const Eigen::Index n_keys = cache.k.rows();
  const Scalar scale = Scalar(1) / std::sqrt(static_cast<Scalar>(dh));
  cache.merged.resize(xq.rows(), d);
  cache.probs.resize(static_cast<std::size_t>(n_heads));
  for (int h = 0; h < n_heads; ++h) {
    Mat<Scalar>& p = cache.probs[static_cast<std::size_t>(h)];
    p.noalias() = (cache.q.middleCols(h * dh, dh) * cache.k.middleCols(h * dh, dh).transpose()) * scale;
    if (causal) {
      softmax_rows_inplace(p, [n_keys](Eigen::Index i) { return std::min(i + 1, n_keys); });
    } else {
      softmax_rows_inplace(p, [n_keys](Eigen::Index) { return n_keys; });
    }
    cache.merged.middleCols(h * dh, dh).noalias() = p * cache.v.middleCols(h * dh, dh);
  }
  return linear(cache.merged, a.out);
}

/// Returns d(xq); adds d(xkv) into `dxkv` (which may alias the caller's dxq
/// accumulator for self-attention).
template <typename Scalar>
Mat<Scalar> attention_backward(const Mat<Scalar>& xq, const Mat<Scalar>& xkv, const Mat<Scalar>& dy,
                               const Attention<Scalar>& a, int n_heads,
                               const AttentionCache<Scalar>& cache, Attention<Scalar>& grad,
                               Mat<Scalar>& dxkv) {
  const Mat<Scalar> dmerged = linear_backward(cache.merged, dy, a.out, grad.out);
  const Eigen::Index d = cache.q.cols();
  const Eigen::Index dh = d / n_heads;
  const Scalar scale = Scalar(1) / std::sqrt(static_cast<Scalar>(dh));
  Mat<Scalar> dq(cache.q.rows(), d), dk(cache.k.rows(), d), dv(cache.v.rows(), d);
  for (int h = 0; h < n_heads; ++h) {
    const Mat<Scalar>& p = cache.probs[static_cast<std::size_t>(h)];
    const auto dout_h = dmerged.middleCols(h * dh, dh);
    dv.middleCols(h * dh, dh).noalias() = p.transpose() * dout_h;
    const Mat<Scalar> dp = dout_h * cache.v.middleCols(h * dh, dh).transpose();
    const Vec<Scalar> row_dot = (dp.array() * p.array()).rowwise().sum();
    const Mat<Scalar> ds = (p.array() * (dp.colwise() - row_dot).array()).matrix() * scale;
    dq.middleCols(h * dh, dh).noalias() = ds * cache.k.middleCols(h * dh, dh);
    dk.middleCols(h * dh, dh).noalias() = ds.transpose() * cache.q.middleCols(h * dh, dh);
  }
  dxkv += linear_backward(xkv, dk, a.key, grad.key);
  dxkv += linear_backward(xkv, dv, a.value, grad.value);
  return linear_backward(xq, dq, a.query, grad.query);
}

/// Sinusoidal position table, positions x d.
template <typename Scalar>
Mat<Scalar> sinusoidal_positions(Eigen::Index positions, Eigen::Index d) {
  Mat<Scalar> pe(positions, d);
  for (Eigen::Index pos = 0; pos < positions; ++pos) {
    for (Eigen::Index i = 0; i < d; i += 2) {
      const double freq = std::pow(10000.0, -static_cast<double>(i) / static_cast<double>(d));
      pe(pos, i) = static_cast<Scalar>(std::sin(pos * freq));
      if (i + 1 < d) pe(pos, i + 1) = static_cast<Scalar>(std::cos(pos * freq));
    }
  }
  return pe;
}

}  // namespace cfh

#endif  // CFH_LAYERS_HPP
