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

#include "cfh/audio.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace cfh {

namespace {

constexpr double kRolloff = 0.95;
constexpr int kZeroCrossings = 48;
constexpr double kKaiserBeta = 9.0;
constexpr long kMaxPhaseTable = 4096;

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

// Modified Bessel function I0 by its power series.
double bessel_i0(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; term > 1e-17 * sum; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
  }
  return sum;
}


// Reflect an index into [0, n) without repeating the edge sample.
long reflect_index(long i, long n) {
  if (n == 1) return 0;
  const long period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

}  // namespace

long FrontendConfig::clip_samples() const {
  return std::lround(clip_seconds * target_rate);
}

long FrontendConfig::frames() const {
  const long n = clip_samples();
  return (n + hop - 1) / hop;
}

void FrontendConfig::validate() const {
  if (target_rate <= 0) throw InvalidInput("frontend: target_rate must be positive");
  if (fft_size <= 0 || hop <= 0) throw InvalidInput("frontend: fft_size and hop must be positive");
  if (hop > fft_size) throw InvalidInput("frontend: hop must not exceed fft_size");
  if (mel_bins < 1) throw InvalidInput("frontend: mel_bins must be >= 1");
  if (!(clip_seconds > 0.0)) throw InvalidInput("frontend: clip_seconds must be positive");
}

Waveform resample(const Waveform& w, int target_rate) {
  if (w.samples.size() == 0) throw InvalidInput("resample: empty waveform");
  if (w.sample_rate <= 0 || target_rate <= 0)
    throw InvalidInput("resample: sample rates must be positive");
  if (w.sample_rate == target_rate) return w;

  const long g = std::gcd(static_cast<long>(w.sample_rate), static_cast<long>(target_rate));
  const long up = target_rate / g;
  const long down = w.sample_rate / g;
  const long n_in = w.samples.size();
  const long n_out = (n_in * up + down - 1) / down;

  // Cutoff as a fraction of the source Nyquist frequency.
  const double cutoff = kRolloff * std::min(1.0, static_cast<double>(up) / down);
  const double half_width = kZeroCrossings / cutoff;
  const long taps_half = static_cast<long>(std::ceil(half_width));
  const long taps = 2 * taps_half;

  const double i0_beta = bessel_i0(kKaiserBeta);
  auto kernel = [&](double dist) {
    const double r = dist / half_width;
    if (std::abs(r) > 1.0) return 0.0;
    return cutoff * sinc(cutoff * dist) * bessel_i0(kKaiserBeta * std::sqrt(1.0 - r * r)) / i0_beta;
  };
  // Taps for output phase `phase`, normalized to unit DC gain.
  auto fill_phase = [&](long phase, double* out) {
    const double frac = static_cast<double>(phase) / up;
    double sum = 0.0;
    for (long j = 0; j < taps; ++j) {
      out[j] = kernel(frac + static_cast<double>(taps_half - 1 - j));
      sum += out[j];
    }
    for (long j = 0; j < taps; ++j) out[j] /= sum;
  };

  const bool use_table = up <= kMaxPhaseTable;
  std::vector<double> table(use_table ? up * taps : taps);
  if (use_table) {
    for (long p = 0; p < up; ++p) fill_phase(p, table.data() + p * taps);
  }

  const Eigen::VectorXd x = w.samples.cast<double>();
  Waveform out;
  out.sample_rate = target_rate;
  out.samples.resize(n_out);
  for (long n = 0; n < n_out; ++n) {
    const long pos = n * down;
    const long base = pos / up;
    const long phase = pos % up;
    const double* h = nullptr;
    if (use_table) {
      h = table.data() + phase * taps;
    } else {
      fill_phase(phase, table.data());
      h = table.data();
    }
    const long first = base - taps_half + 1;
    const long j_lo = std::max(0L, -first);
    const long j_hi = std::min(taps, n_in - first);
    double acc = 0.0;
    if (j_hi > j_lo) {
      acc = Eigen::Map<const Eigen::VectorXd>(h + j_lo, j_hi - j_lo).dot(x.segment(first + j_lo, j_hi - j_lo));
    }
    out.samples[n] = static_cast<float>(acc);
  }
  return out;
}

Waveform pad_or_trim(const Waveform& w, const FrontendConfig& cfg) {
  if (w.sample_rate != cfg.target_rate)
    throw InvalidInput("pad_or_trim: waveform sample rate does not match the frontend");
  const long n = cfg.clip_samples();
  Waveform out;
  out.sample_rate = w.sample_rate;
  out.samples = Eigen::VectorXf::Zero(n);
  const long keep = std::min<long>(n, w.samples.size());
  out.samples.head(keep) = w.samples.head(keep);
  return out;
}

Eigen::MatrixXd mel_filterbank(int sample_rate, int fft_size, int mel_bins) {
  const int n_freqs = fft_size / 2 + 1;
  const double mel_lo = hz_to_mel(0.0);
  const double mel_hi = hz_to_mel(sample_rate / 2.0);
  std::vector<double> edges(mel_bins + 2);
  for (int i = 0; i < mel_bins + 2; ++i) {
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (mel_bins + 1));
  }
  Eigen::MatrixXd fb = Eigen::MatrixXd::Zero(mel_bins, n_freqs);
  for (int b = 0; b < mel_bins; ++b) {
    const double lo = edges[b], center = edges[b + 1], hi = edges[b + 2];
    for (int k = 0; k < n_freqs; ++k) {
      const double f = static_cast<double>(k) * sample_rate / fft_size;
      const double rise = (f - lo) / (center - lo);
      const double fall = (hi - f) / (hi - center);
      fb(b, k) = std::max(0.0, std::min(rise, fall));
    }
  }
  return fb;
}

Eigen::MatrixXd power_spectrogram(const Waveform& w, const FrontendConfig& cfg) {
  cfg.validate();
  if (w.samples.size() == 0) throw InvalidInput("log_mel: empty waveform");
  if (w.sample_rate != cfg.target_rate)
    throw InvalidInput("log_mel: waveform sample rate does not match the frontend; resample first");

  const long n = w.samples.size();
  const long n_frames = (n + cfg.hop - 1) / cfg.hop;
  const int n_fft = cfg.fft_size;
  const int n_freqs = n_fft / 2 + 1;
  const long pad = n_fft / 2;

  std::vector<double> window(n_fft);
  for (int i = 0; i < n_fft; ++i) {
    // periodic Hann
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n_fft);
  }

  Eigen::FFT<double> fft;
  std::vector<double> frame(n_fft);
  std::vector<std::complex<double>> spectrum;
  Eigen::MatrixXd power(n_frames, n_freqs);
  for (long t = 0; t < n_frames; ++t) {
    const long start = t * cfg.hop - pad;
    for (int i = 0; i < n_fft; ++i) {
      frame[i] = window[i] * w.samples[reflect_index(start + i, n)];
    }
    fft.fwd(spectrum, frame);
    for (int k = 0; k < n_freqs; ++k) power(t, k) = std::norm(spectrum[k]);
  }
  return power;
}

MelSpectrogram log_mel(const Waveform& w, const FrontendConfig& cfg) {
  const Eigen::MatrixXd power = power_spectrogram(w, cfg);
  const Eigen::MatrixXd fb = mel_filterbank(cfg.target_rate, cfg.fft_size, cfg.mel_bins);
  Eigen::MatrixXd mel = (power * fb.transpose()).cwiseMax(1e-10).array().log10().matrix();
  const double floor = mel.maxCoeff() - 8.0;
  mel = mel.cwiseMax(floor);
  mel = ((mel.array() + 4.0) / 4.0).matrix();

  MelSpectrogram out;
  out.frames = mel.cast<float>();
  out.frame_hop_seconds = static_cast<double>(cfg.hop) / cfg.target_rate;
  return out;
}

MelSpectrogram featurize(const Waveform& w, const FrontendConfig& cfg) {
  return log_mel(pad_or_trim(resample(w, cfg.target_rate), cfg), cfg);
}

}  // namespace cfh
