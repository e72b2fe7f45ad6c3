// SPDX-License-Identifier: Apache-2.0
#include "bearingntf/spectrogram.hpp"

#include <cmath>
#include <numbers>

#include "bearingntf/error.hpp"
#include "bearingntf/fft.hpp"

namespace bearingntf {

WindowKind window_from_string(const std::string& name) {
  if (name == "hamming" || name == "hamm") return WindowKind::hamming;
  if (name == "hann" || name == "hanning") return WindowKind::hann;
  if (name == "rect" || name == "rectangular" || name == "boxcar") return WindowKind::rectangular;
  throw ConfigError("unknown window kind: " + name);
}

std::string to_string(WindowKind kind) {
  switch (kind) {
    case WindowKind::hamming: return "hamming";
    case WindowKind::hann: return "hann";
    case WindowKind::rectangular: return "rectangular";
  }
  return "unknown";
}

std::vector<double> make_window(WindowKind kind, std::size_t n) {
  std::vector<double> w(n, 1.0);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double c = std::cos(step * static_cast<double>(k));
    if (kind == WindowKind::hamming) w[k] = 0.54 - 0.46 * c;
    if (kind == WindowKind::hann) w[k] = 0.5 - 0.5 * c;
  }
  return w;
}

std::size_t StftParams::frame_count(std::size_t samples) const noexcept {
  if (samples < window_len || hop() == 0) return 0;
  return (samples - window_len) / hop() + 1;
}

void StftParams::validate() const {
  if (window_len == 0 || overlap >= window_len || window_len > nfft) {
    throw ConfigError("stft: need 0 <= overlap < window_len <= nfft");
  }
  if (!(fs > 0.0)) throw ConfigError("stft: fs must be positive");
}

Spectrogram stft_spectrogram(std::span<const double> signal, const StftParams& p) {
  p.validate();
  if (signal.size() < p.window_len) {
    throw DataError("stft: signal of " + std::to_string(signal.size()) +
                    " samples is shorter than the window (" + std::to_string(p.window_len) + ")");
  }
  const std::size_t K = p.frame_count(signal.size());
  const std::size_t I = p.bins();
  const std::size_t hop = p.hop();
  const auto window = make_window(p.window, p.window_len);

  Spectrogram sg;
  sg.params = p;
  sg.values = Matrix(I, K);
  sg.freq_axis.resize(I);
  for (std::size_t k = 0; k < I; ++k) {
    sg.freq_axis[k] = static_cast<double>(k) * p.fs / static_cast<double>(p.nfft);
  }
  sg.time_axis.resize(K);

  RealFft fft(p.nfft);
  std::vector<double> frame(p.window_len);
  for (std::size_t f = 0; f < K; ++f) {
    const std::size_t start = f * hop;
    for (std::size_t t = 0; t < p.window_len; ++t) frame[t] = signal[start + t] * window[t];
    const auto spec = fft.forward(frame);
    auto out = sg.values.col(f);
    for (std::size_t k = 0; k < I; ++k) out[k] = std::norm(spec[k]);
    sg.time_axis[f] = (static_cast<double>(start) + 0.5 * static_cast<double>(p.window_len)) / p.fs;
  }
  return sg;
}

std::size_t fold_samples(const StftParams& p, double fold_len_s) {
  if (!(fold_len_s > 0.0)) throw ConfigError("tensorize: fold length must be positive");
  return static_cast<std::size_t>(std::llround(fold_len_s * p.fs));
}

Tensor3 tensorize(std::span<const double> signal, const StftParams& p, double fold_len_s,
                  std::size_t fold_count, TensorizeMode mode) {
  p.validate();
  if (fold_count == 0) throw ConfigError("tensorize: fold count must be positive");
  const std::size_t F = fold_samples(p, fold_len_s);
  if (signal.size() < F * fold_count) {
    throw DataError("tensorize: signal has " + std::to_string(signal.size()) + " samples, " +
                    std::to_string(fold_count) + " folds of " + std::to_string(F) + " need " +
                    std::to_string(F * fold_count));
  }
  const std::size_t I = p.bins();

  if (mode == TensorizeMode::global_slice) {
    const auto sg = stft_spectrogram(signal.first(F * fold_count), p);
    const std::size_t P = sg.values.cols() / fold_count;
    if (P == 0) throw DataError("tensorize: fewer frames than folds");
    Tensor3 t({I, P, fold_count});
    for (std::size_t l = 0; l < fold_count; ++l) {
      for (std::size_t q = 0; q < P; ++q) {
        auto src = sg.values.col(l * P + q);
        std::copy(src.begin(), src.end(), t.data().begin() + t.offset(0, q, l));
      }
    }
    return t;
  }

  const std::size_t P = p.frame_count(F);
  if (P == 0) throw DataError("tensorize: fold shorter than one window");
  Tensor3 t({I, P, fold_count});
  for (std::size_t l = 0; l < fold_count; ++l) {
    const auto sg = stft_spectrogram(signal.subspan(l * F, F), p);
    t.set_slice(l, sg.values);
  }
  return t;
}

}  // namespace bearingntf
