// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "bearingntf/tensor.hpp"

namespace bearingntf {

// Fisher-Pearson coefficient g1 = m3 / m2^(3/2) (biased central moments).
// Returns 0 for zero variance. Throws DataError for fewer than 3 samples.
double skewness(std::span<const double> x);

// Column of H with the largest skewness; ties go to the lowest index.
std::size_t select_component(const Matrix& h);
std::vector<double> column_skewness(const Matrix& h);

struct Spectrum {
  std::vector<double> magnitude;  // one-sided, bin 0 = DC
  double bin_hz = 0.0;            // frequency step
  std::vector<double> freq_axis() const;
  double nyquist() const noexcept;
};

// One-sided amplitude spectrum 2|X_k|/N of the mean-removed profile, DC bin
// set to 0. frame_rate is the profile sampling rate (fs / hop).
Spectrum time_profile_spectrum(std::span<const double> h, double frame_rate);

struct SbiResult {
  double value = 0.0;
  std::vector<double> harmonics;  // AIS_1..AIS_m1
};

// Spectrum-based indicator: sum_i AIS_i^2 / sum_k S_k, with AIS_i the peak
// magnitude within +-1 bin of i*fault_freq and the denominator summing every
// non-DC bin. The squared numerator over a linear denominator makes the
// value scale linearly with the spectrum. 0/0 returns 0. Throws ConfigError
// when a harmonic is above the Nyquist frequency of the profile.
SbiResult sbi_detail(const Spectrum& spectrum, double fault_freq, std::size_t m1 = 6);
double sbi(const Spectrum& spectrum, double fault_freq, std::size_t m1 = 6);

// Largest non-DC peak bin.
std::size_t peak_bin(const Spectrum& spectrum);

struct DiagnosticReport {
  std::size_t selected_component = 0;
  std::vector<double> skewness;
  Spectrum profile_spectrum;
  double sbi = 0.0;
  std::vector<double> harmonics;
  double fault_freq = 0.0;
  std::size_t m1 = 6;
  std::vector<double> frequency_profile;  // selected column of W
  std::vector<double> time_profile;       // selected column of H
};

// Skewness selection on H, then spectrum and SBI of the selected profile.
DiagnosticReport diagnose(const Matrix& w, const Matrix& h, double frame_rate, double fault_freq,
                          std::size_t m1 = 6);

struct NoiseMapCase {
  double sigma = 0.0;
  double snr_db = 0.0;
  std::vector<double> frequency_profile;
  std::vector<double> time_profile;
};

struct NoiseMap {
  Matrix values;  // axis bins x cases, each non-zero column has max 1
  std::vector<double> sigma;
  std::vector<double> snr_db;
  std::vector<double> axis;  // Hz or s per row
  std::vector<std::string> labels() const;
};

struct NoiseMaps {
  NoiseMap frequency;
  NoiseMap time;
};

// Columns ordered by decreasing SNR. freq_axis / time_axis label the rows and
// may be empty (row index is used then).
NoiseMaps build_noise_maps(std::vector<NoiseMapCase> cases, std::span<const double> freq_axis = {},
                           std::span<const double> time_axis = {});

}  // namespace bearingntf
