// accentlab/frontend.hpp

// Copyright 2026  Accentlab Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef ACCENTLAB_FRONTEND_HPP_
#define ACCENTLAB_FRONTEND_HPP_

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "accentlab/error.hpp"
#include "accentlab/matrix.hpp"
#include "accentlab/wav.hpp"

namespace accentlab {

// MFCC front-end settings. Only the 39-dim output shape (13 cepstra + deltas
// + delta-deltas) is fixed by the downstream models; everything else is a
// declared convention: snip-edges framing, Hamming window, HTK mel scale,
// orthonormal DCT-II, log floor on filterbank energies.
struct FrontendConfig {
  double frame_length_ms = 25.0;
  double frame_shift_ms = 10.0;
  int num_mel_filters = 23;
  int num_cepstra = 13;
  double preemphasis = 0.97;
  int delta_window = 2;
  double energy_floor = 1e-10;  // floor on mel energies before the log

  void validate() const {
    if (frame_shift_ms <= 0.0 || frame_length_ms < frame_shift_ms)
      throw InvalidConfig("frontend: need frame_length_ms >= frame_shift_ms > 0");
    if (num_mel_filters < 1 || num_cepstra < 1 || num_cepstra > num_mel_filters)
      throw InvalidConfig("frontend: need 1 <= num_cepstra <= num_mel_filters");
    if (preemphasis < 0.0 || preemphasis >= 1.0)
      throw InvalidConfig("frontend: preemphasis must be in [0, 1)");
    if (delta_window < 1) throw InvalidConfig("frontend: delta_window must be >= 1");
    if (energy_floor <= 0.0) throw InvalidConfig("frontend: energy_floor must be positive");
  }
};

namespace detail {

// In-place iterative radix-2 FFT; n must be a power of two.
inline void fft_radix2(std::vector<std::complex<double>>& a) {
  const size_t n = a.size();
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    double ang = -2.0 * M_PI / static_cast<double>(len);
    std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

}  // namespace detail

// Triangular mel filter weights over FFT bins 0..nfft/2. Filter m rises from
// edge m to edge m+1 and falls to edge m+2, with M+2 edges equally spaced in
// mel between 0 Hz and the Nyquist frequency.
inline std::vector<std::vector<double>> mel_filter_weights(int num_filters, int nfft,
                                                           int sample_rate) {
  const int nbins = nfft / 2 + 1;
  const double mel_low = detail::hz_to_mel(0.0);
  const double mel_high = detail::hz_to_mel(sample_rate / 2.0);
  std::vector<double> edges(num_filters + 2);
  for (int i = 0; i < num_filters + 2; ++i)
    edges[i] = mel_low + (mel_high - mel_low) * i / (num_filters + 1);

  std::vector<std::vector<double>> weights(num_filters, std::vector<double>(nbins, 0.0));
  for (int k = 0; k < nbins; ++k) {
    double mel_k = detail::hz_to_mel(static_cast<double>(k) * sample_rate / nfft);
    for (int m = 0; m < num_filters; ++m) {
      double left = edges[m], center = edges[m + 1], right = edges[m + 2];
      if (mel_k > left && mel_k < right) {
        weights[m][k] = mel_k <= center ? (mel_k - left) / (center - left)
                                        : (right - mel_k) / (right - center);
      }
    }
  }
  return weights;
}

inline int frame_count(int num_samples, int frame_samples, int shift_samples) {
  if (num_samples < frame_samples) return 0;
  return (num_samples - frame_samples) / shift_samples + 1;
}

// Log mel filterbank energies (T x num_mel_filters): pre-emphasis, Hamming
// window, magnitude FFT, triangular mel filters, floored log.
inline Matrix compute_log_mel(const Waveform& w, const FrontendConfig& cfg) {
  cfg.validate();
  if (w.sample_rate <= 0) throw InvalidInput("compute_log_mel: sample_rate must be positive");
  if (w.samples.empty()) throw InsufficientAudio("compute_log_mel: empty waveform");
  if (!all_finite(w.samples)) throw InvalidInput("compute_log_mel: non-finite samples");

  const int frame_samples = static_cast<int>(std::lround(cfg.frame_length_ms * w.sample_rate / 1000.0));
  const int shift_samples = static_cast<int>(std::lround(cfg.frame_shift_ms * w.sample_rate / 1000.0));
  if (frame_samples < 1 || shift_samples < 1)
    throw InvalidConfig("compute_log_mel: frame/shift shorter than one sample");
  const int num_frames = frame_count(static_cast<int>(w.samples.size()), frame_samples, shift_samples);
  if (num_frames < 1)
    throw InsufficientAudio("compute_log_mel: waveform shorter than one frame (" +
                            std::to_string(w.samples.size()) + " < " +
                            std::to_string(frame_samples) + " samples)");

  // Whole-signal pre-emphasis: y[t] = x[t] - k*x[t-1], y[0] = (1-k)*x[0].
  std::vector<double> emphasized(w.samples.size());
  emphasized[0] = (1.0 - cfg.preemphasis) * w.samples[0];
  for (size_t t = 1; t < w.samples.size(); ++t)
    emphasized[t] = w.samples[t] - cfg.preemphasis * w.samples[t - 1];

  int nfft = 1;
  while (nfft < frame_samples) nfft <<= 1;
  const int nbins = nfft / 2 + 1;

  std::vector<double> window(frame_samples);
  for (int n = 0; n < frame_samples; ++n)
    window[n] = 0.54 - 0.46 * std::cos(2.0 * M_PI * n / (frame_samples - 1));

  const auto filters = mel_filter_weights(cfg.num_mel_filters, nfft, w.sample_rate);

  Matrix out(num_frames, cfg.num_mel_filters);
  std::vector<std::complex<double>> buf(nfft);
  for (int t = 0; t < num_frames; ++t) {
    const int offset = t * shift_samples;
    for (int n = 0; n < frame_samples; ++n)
      buf[n] = emphasized[offset + n] * window[n];
    std::fill(buf.begin() + frame_samples, buf.end(), std::complex<double>(0.0, 0.0));
    detail::fft_radix2(buf);
    for (int m = 0; m < cfg.num_mel_filters; ++m) {
      double energy = 0.0;
      for (int k = 0; k < nbins; ++k) energy += filters[m][k] * std::abs(buf[k]);
      out(t, m) = std::log(std::max(energy, cfg.energy_floor));
    }
  }
  return out;
}

// T x num_cepstra static MFCCs: orthonormal DCT-II of the log mel energies.
inline Matrix compute_mfcc(const Waveform& w, const FrontendConfig& cfg) {
  Matrix log_mel = compute_log_mel(w, cfg);
  const int m_count = cfg.num_mel_filters;
  Matrix out(log_mel.rows(), cfg.num_cepstra);
  const double scale0 = std::sqrt(1.0 / m_count);
  const double scale = std::sqrt(2.0 / m_count);
  for (int t = 0; t < log_mel.rows(); ++t) {
    for (int i = 0; i < cfg.num_cepstra; ++i) {
      double acc = 0.0;
      for (int j = 0; j < m_count; ++j)
        acc += log_mel(t, j) * std::cos(M_PI * i * (2 * j + 1) / (2.0 * m_count));
      out(t, i) = (i == 0 ? scale0 : scale) * acc;
    }
  }
  return out;
}

// Appends delta and delta-delta blocks: output is T x 3D with column order
// [static | delta | delta-delta]. Deltas use the regression formula over
// +/- window frames with edge frames replicated; delta-deltas apply the same
// formula to the delta block.
inline Matrix append_deltas(const Matrix& f, int window) {
  if (window < 1) throw InvalidConfig("append_deltas: window must be >= 1");
  if (f.empty()) throw InvalidInput("append_deltas: empty feature matrix");

  const int T = f.rows(), D = f.cols();
  double denom = 0.0;
  for (int n = 1; n <= window; ++n) denom += 2.0 * n * n;

  auto regression = [&](auto&& value, int t, int c) {
    double acc = 0.0;
    for (int n = 1; n <= window; ++n) {
      int fwd = std::min(t + n, T - 1);
      int bwd = std::max(t - n, 0);
      acc += n * (value(fwd, c) - value(bwd, c));
    }
    return acc / denom;
  };

  Matrix out(T, 3 * D);
  for (int t = 0; t < T; ++t)
    for (int c = 0; c < D; ++c) out(t, c) = f(t, c);
  for (int t = 0; t < T; ++t)
    for (int c = 0; c < D; ++c)
      out(t, D + c) = regression([&](int r, int cc) { return f(r, cc); }, t, c);
  for (int t = 0; t < T; ++t)
    for (int c = 0; c < D; ++c)
      out(t, 2 * D + c) = regression([&](int r, int cc) { return out(r, D + cc); }, t, c);
  return out;
}

// Utterance-level CMVN: every column is shifted and scaled to zero mean and
// unit variance, with population (1/T) statistics. Variances are floored, so
// constant columns come out as all zeros.
inline Matrix apply_cmvn(const Matrix& f) {
  constexpr double kVarianceFloor = 1e-10;
  if (f.rows() < 2)
    throw InsufficientFrames("apply_cmvn: need at least 2 frames, got " +
                             std::to_string(f.rows()));
  const int T = f.rows(), D = f.cols();
  Matrix out(T, D);
  for (int c = 0; c < D; ++c) {
    double mean = 0.0;
    for (int t = 0; t < T; ++t) mean += f(t, c);
    mean /= T;
    double var = 0.0;
    for (int t = 0; t < T; ++t) {
      double d = f(t, c) - mean;
      var += d * d;
    }
    var /= T;
    double inv_std = 1.0 / std::sqrt(std::max(var, kVarianceFloor));
    for (int t = 0; t < T; ++t) out(t, c) = (f(t, c) - mean) * inv_std;
  }
  return out;
}

// The full 39-dimensional front-end: MFCC -> deltas -> CMVN.
inline Matrix compute_features(const Waveform& w, const FrontendConfig& cfg) {
  return apply_cmvn(append_deltas(compute_mfcc(w, cfg), cfg.delta_window));
}

}  // namespace accentlab

#endif  // ACCENTLAB_FRONTEND_HPP_
