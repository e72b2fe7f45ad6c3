// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "bearingntf/tensor.hpp"

namespace bearingntf {

enum class WindowKind { hamming, hann, rectangular };

WindowKind window_from_string(const std::string& name);
std::string to_string(WindowKind kind);

// Periodic window of length n (Hamming: 0.54 - 0.46 cos(2 pi k / n)).
std::vector<double> make_window(WindowKind kind, std::size_t n);

struct StftParams {
  std::size_t window_len = 128;
  std::size_t overlap = 100;
  std::size_t nfft = 512;
  WindowKind window = WindowKind::hamming;
  double fs = 25000.0;

  std::size_t hop() const noexcept { return window_len - overlap; }
  std::size_t bins() const noexcept { return nfft / 2 + 1; }
  double frame_rate() const noexcept { return fs / static_cast<double>(hop()); }
  // Frames produced for a signal of `samples` samples (0 if too short).
  std::size_t frame_count(std::size_t samples) const noexcept;
  void validate() const;
};

// Squared-magnitude STFT. values is I x K (bins x frames), one column per
// frame, so a frame is contiguous.
struct Spectrogram {
  Matrix values;
  std::vector<double> freq_axis;  // Hz, bin k -> k*fs/nfft
  std::vector<double> time_axis;  // s, center of each left-aligned frame
  StftParams params;
};

// Frame k covers samples [k*hop, k*hop + window_len); trailing samples that
// do not fill a whole window are dropped. Throws DataError if the signal is
// shorter than one window.
Spectrogram stft_spectrogram(std::span<const double> signal, const StftParams& p);

enum class TensorizeMode {
  per_fold,      // independent STFT per fold; no frame straddles a fold edge
  global_slice,  // one STFT over the covered span, frames cut into L blocks
};

// Cuts the first fold_count*fold_len_s seconds into consecutive folds and
// stacks their spectrograms as lateral slices of an (I, P, L) tensor.
Tensor3 tensorize(std::span<const double> signal, const StftParams& p, double fold_len_s,
                  std::size_t fold_count, TensorizeMode mode = TensorizeMode::per_fold);

// Samples per fold, round(fold_len_s * fs).
std::size_t fold_samples(const StftParams& p, double fold_len_s);

}  // namespace bearingntf
