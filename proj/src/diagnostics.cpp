// SPDX-License-Identifier: Apache-2.0
#include "bearingntf/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bearingntf/error.hpp"
#include "bearingntf/fft.hpp"
#include "bearingntf/tensor_io.hpp"

namespace bearingntf {

double skewness(std::span<const double> x) {
  if (x.size() < 3) throw DataError("skewness: need at least 3 samples");
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double m2 = 0.0;
  double m3 = 0.0;
  for (double v : x) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= n;
  m3 /= n;
  // Relative guard: a constant vector can leave rounding noise in m2.
  if (m2 <= 1e-28 * (mean * mean + 1e-300)) return 0.0;
  return m3 / std::pow(m2, 1.5);
}

std::vector<double> column_skewness(const Matrix& h) {
  std::vector<double> s(h.cols());
  for (std::size_t j = 0; j < h.cols(); ++j) s[j] = skewness(h.col(j));
  return s;
}

std::size_t select_component(const Matrix& h) {
  if (h.cols() == 0) throw DataError("select_component: no components");
  const auto s = column_skewness(h);
  std::size_t best = 0;
  for (std::size_t j = 1; j < s.size(); ++j)
    if (s[j] > s[best]) best = j;
  return best;
}

std::vector<double> Spectrum::freq_axis() const {
  std::vector<double> f(magnitude.size());
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = static_cast<double>(k) * bin_hz;
  return f;
}

double Spectrum::nyquist() const noexcept {
  return magnitude.empty() ? 0.0 : static_cast<double>(magnitude.size() - 1) * bin_hz;
}

Spectrum time_profile_spectrum(std::span<const double> h, double frame_rate) {
  if (h.empty()) throw DataError("time_profile_spectrum: empty profile");
  if (!(frame_rate > 0.0)) throw ConfigError("time_profile_spectrum: frame rate must be positive");
  const std::size_t n = h.size();
  const double mean = std::accumulate(h.begin(), h.end(), 0.0) / static_cast<double>(n);
  std::vector<double> centered(n);
  for (std::size_t k = 0; k < n; ++k) centered[k] = h[k] - mean;

  RealFft fft(n);
  const auto X = fft.forward(centered);
  Spectrum s;
  s.bin_hz = frame_rate / static_cast<double>(n);
  s.magnitude.resize(fft.bins());
  const double scale = 2.0 / static_cast<double>(n);
  for (std::size_t k = 1; k < s.magnitude.size(); ++k) {
    const bool nyquist_bin = n % 2 == 0 && k == n / 2;
    s.magnitude[k] = std::abs(X[k]) * (nyquist_bin ? 0.5 * scale : scale);
  }
  s.magnitude[0] = 0.0;
  return s;
}

SbiResult sbi_detail(const Spectrum& spectrum, double fault_freq, std::size_t m1) {
  if (spectrum.magnitude.empty()) throw DataError("sbi: empty spectrum");
  if (!(fault_freq > 0.0) || !(spectrum.bin_hz > 0.0)) {
    throw ConfigError("sbi: fault frequency and bin spacing must be positive");
  }
  const auto& mag = spectrum.magnitude;
  const std::size_t last = mag.size() - 1;
  SbiResult r;
  r.harmonics.resize(m1);
  double num = 0.0;
  for (std::size_t i = 1; i <= m1; ++i) {
    const double f = static_cast<double>(i) * fault_freq;
    if (f > spectrum.nyquist() + 1e-9) {
      throw ConfigError("sbi: harmonic " + std::to_string(i) + " at " + std::to_string(f) +
                        " Hz is above the profile Nyquist frequency " +
                        std::to_string(spectrum.nyquist()) + " Hz");
    }
    const auto centre = static_cast<std::size_t>(std::llround(f / spectrum.bin_hz));
    const std::size_t lo = std::max<std::size_t>(1, centre == 0 ? 1 : centre - 1);
    const std::size_t hi = std::min(last, centre + 1);
    double peak = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) peak = std::max(peak, mag[k]);
    r.harmonics[i - 1] = peak;
    num += peak * peak;
  }
  double den = 0.0;
  for (std::size_t k = 1; k < mag.size(); ++k) den += mag[k];
  r.value = den > 0.0 ? num / den : 0.0;
  return r;
}

double sbi(const Spectrum& spectrum, double fault_freq, std::size_t m1) {
  return sbi_detail(spectrum, fault_freq, m1).value;
}

std::size_t peak_bin(const Spectrum& spectrum) {
  std::size_t best = 1;
  for (std::size_t k = 1; k < spectrum.magnitude.size(); ++k)
    if (spectrum.magnitude[k] > spectrum.magnitude[best]) best = k;
  return spectrum.magnitude.size() > 1 ? best : 0;
}

DiagnosticReport diagnose(const Matrix& w, const Matrix& h, double frame_rate, double fault_freq,
                          std::size_t m1) {
  if (w.cols() != h.cols()) throw ShapeError("diagnose: W and H ranks differ");
  DiagnosticReport rep;
  rep.skewness = column_skewness(h);
  rep.selected_component = select_component(h);
  rep.time_profile = h.col_copy(rep.selected_component);
  rep.frequency_profile = w.col_copy(rep.selected_component);
  rep.profile_spectrum = time_profile_spectrum(rep.time_profile, frame_rate);
  const auto s = sbi_detail(rep.profile_spectrum, fault_freq, m1);
  rep.sbi = s.value;
  rep.harmonics = s.harmonics;
  rep.fault_freq = fault_freq;
  rep.m1 = m1;
  return rep;
}

std::vector<std::string> NoiseMap::labels() const {
  std::vector<std::string> out(sigma.size());
  for (std::size_t c = 0; c < out.size(); ++c) {
    out[c] = "sigma=" + format_short(sigma[c]) + "|snr_db=" + format_short(snr_db[c]);
  }
  return out;
}

namespace {

NoiseMap assemble(const std::vector<NoiseMapCase>& cases, bool frequency,
                  std::span<const double> axis) {
  const auto& first = frequency ? cases.front().frequency_profile : cases.front().time_profile;
  const std::size_t rows = first.size();
  NoiseMap map;
  map.values = Matrix(rows, cases.size());
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const auto& prof = frequency ? cases[c].frequency_profile : cases[c].time_profile;
    if (prof.size() != rows) throw ShapeError("build_noise_maps: inconsistent profile lengths");
    const double mx = prof.empty() ? 0.0 : *std::max_element(prof.begin(), prof.end());
    auto col = map.values.col(c);
    for (std::size_t r = 0; r < rows; ++r) col[r] = mx > 0.0 ? prof[r] / mx : prof[r];
    map.sigma.push_back(cases[c].sigma);
    map.snr_db.push_back(cases[c].snr_db);
  }
  if (!axis.empty()) {
    if (axis.size() != rows) throw ShapeError("build_noise_maps: axis length mismatch");
    map.axis.assign(axis.begin(), axis.end());
  } else {
    map.axis.resize(rows);
    std::iota(map.axis.begin(), map.axis.end(), 0.0);
  }
  return map;
}

}  // namespace

NoiseMaps build_noise_maps(std::vector<NoiseMapCase> cases, std::span<const double> freq_axis,
                           std::span<const double> time_axis) {
  if (cases.empty()) throw DataError("build_noise_maps: no cases");
  std::stable_sort(cases.begin(), cases.end(),
                   [](const NoiseMapCase& a, const NoiseMapCase& b) { return a.snr_db > b.snr_db; });
  return {assemble(cases, true, freq_axis), assemble(cases, false, time_axis)};
}

}  // namespace bearingntf
