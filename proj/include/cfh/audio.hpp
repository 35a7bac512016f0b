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

#ifndef CFH_AUDIO_HPP
#define CFH_AUDIO_HPP

#include <cmath>
#include <istream>
#include <string>

#include "cfh/common.hpp"

namespace cfh {

/// Mono audio. Samples are nominally in [-1, 1].
struct Waveform {
  Eigen::VectorXf samples;
  int sample_rate = 16000;

  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

enum class WindowKind { kHann };

struct FrontendConfig {
  int target_rate = 16000;
  int fft_size = 400;
  int hop = 160;
  int mel_bins = 80;
  WindowKind window = WindowKind::kHann;
  double clip_seconds = 30.0;

  long clip_samples() const;
  /// Frame count of a clip-length input: ceil(clip_samples / hop).
  long frames() const;
  void validate() const;
};

/// T x B log-mel energies, one row per frame.
struct MelSpectrogram {
  Eigen::MatrixXf frames;
  double frame_hop_seconds = 0.01;
};

/// Band-limited windowed-sinc resampling. Returns `w` unchanged when the rates
/// already match.
Waveform resample(const Waveform& w, int target_rate);

/// Zero-pads or truncates at the end to exactly clip_seconds * target_rate.
Waveform pad_or_trim(const Waveform& w, const FrontendConfig& cfg);

/// HTK-scale triangular filterbank, mel_bins x (fft_size / 2 + 1).
Eigen::MatrixXd mel_filterbank(int sample_rate, int fft_size, int mel_bins);

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

/// Windowed STFT power spectrum, frames x (fft_size / 2 + 1). Frames are centered
/// at multiples of hop with reflect padding.
Eigen::MatrixXd power_spectrogram(const Waveform& w, const FrontendConfig& cfg);

/// Power STFT -> mel -> log10 with 1e-10 floor -> clamp at (max - 8) -> (x + 4) / 4.
MelSpectrogram log_mel(const Waveform& w, const FrontendConfig& cfg);

/// resample, pad_or_trim and log_mel in sequence.
MelSpectrogram featurize(const Waveform& w, const FrontendConfig& cfg);

/// Reads RIFF/WAVE: 16-bit PCM or 32-bit float, any channel count (averaged).
Waveform read_wav(const std::string& path);
/// Same, from a stream; `path` only labels error messages.
Waveform read_wav(std::istream& in, const std::string& path);

enum class WavEncoding { kPcm16, kFloat32 };

void write_wav(const std::string& path, const Waveform& w,
               WavEncoding encoding = WavEncoding::kPcm16);

}  // namespace cfh

#endif  // CFH_AUDIO_HPP
