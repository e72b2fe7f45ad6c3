// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bearingntf {

struct LoadedSignal {
  std::vector<double> samples;
  double fs = 0.0;
  std::size_t channels = 1;
  std::vector<std::string> warnings;
};

// Mono 32-bit IEEE float WAV.
void write_wav_float(const std::filesystem::path& path, std::span<const double> samples, double fs);

// RIFF/WAVE with 16-bit PCM or 32-bit float data; for multi-channel files the
// first channel is returned and a warning recorded. 16-bit samples are
// scaled to [-1, 1).
LoadedSignal read_wav(const std::filesystem::path& path);

// WAV by extension/magic, otherwise a single-column CSV (an optional
// non-numeric header line is skipped). CSV input needs fs; a missing sample
// rate is a ConfigError.
LoadedSignal load_signal(const std::filesystem::path& path, std::optional<double> fs = std::nullopt);

}  // namespace bearingntf
