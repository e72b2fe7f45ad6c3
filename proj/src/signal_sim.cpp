// SPDX-License-Identifier: Apache-2.0
#include "bearingntf/signal_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "bearingntf/error.hpp"

namespace bearingntf {

namespace {

constexpr double kTailLog = 30.0;  // exp(-30) ~ 1e-13

}  // namespace

std::size_t SimConfig::sample_count() const {
  return static_cast<std::size_t>(std::llround(duration * fs));
}

void SimConfig::validate() const {
  if (!(fs > 0.0)) throw ConfigError("sim: fs must be positive");
  if (!(fs > 2.0 * std::max(soi_carrier, dist_carrier))) {
    throw ConfigError("sim: fs must exceed twice the highest carrier frequency");
  }
  if (!(duration > 0.0) || !(fault_freq > 0.0) || duration * fault_freq < 1.0) {
    throw ConfigError("sim: duration must cover at least one fault period");
  }
  if (soi_amplitude < 0.0 || dist_amplitude < 0.0) throw ConfigError("sim: amplitudes must be >= 0");
  if (!(soi_damping > 0.0) || !(dist_damping > 0.0)) throw ConfigError("sim: damping must be > 0");
  if (dist_count < 0) throw ConfigError("sim: dist_count must be >= 0");
  if (noise_sigma < 0.0) throw ConfigError("sim: noise_sigma must be >= 0");
}

void add_burst(std::span<double> out, double fs, double onset, const Burst& burst) {
  if (burst.amplitude == 0.0) return;
  const auto first = static_cast<std::size_t>(std::ceil(onset * fs));
  const double tail = kTailLog / burst.damping;
  const double omega = 2.0 * std::numbers::pi * burst.carrier;
  for (std::size_t k = first; k < out.size(); ++k) {
    const double t = static_cast<double>(k) / fs - onset;
    if (t > tail) break;
    out[k] += burst.amplitude * std::exp(-burst.damping * t) * std::sin(omega * t + burst.phase);
  }
}

std::vector<double> soi_onsets(const SimConfig& cfg) {
  cfg.validate();
  std::vector<double> onsets;
  const double period = 1.0 / cfg.fault_freq;
  for (std::size_t m = 0;; ++m) {
    const double t = static_cast<double>(m) * period;
    // Onsets are compared at sample resolution so that duration*fault_freq
    // integral does not gain a spurious extra onset from rounding.
    if (t * cfg.fs >= static_cast<double>(cfg.sample_count()) - 1e-6) break;
    onsets.push_back(t);
  }
  return onsets;
}

std::vector<double> generate_soi(const SimConfig& cfg) {
  std::vector<double> s(cfg.sample_count(), 0.0);
  const Burst b{cfg.soi_amplitude, cfg.soi_carrier, cfg.soi_damping, cfg.soi_phase};
  for (double t : soi_onsets(cfg)) add_burst(s, cfg.fs, t, b);
  return s;
}

std::vector<double> disturbance_onsets(const SimConfig& cfg, CounterRng& rng) {
  cfg.validate();
  std::vector<double> onsets(static_cast<std::size_t>(cfg.dist_count));
  for (auto& t : onsets) t = rng.uniform() * cfg.duration;
  std::sort(onsets.begin(), onsets.end());
  return onsets;
}

std::vector<double> generate_disturbance(const SimConfig& cfg, CounterRng& rng) {
  std::vector<double> d(cfg.sample_count(), 0.0);
  const Burst b{cfg.dist_amplitude, cfg.dist_carrier, cfg.dist_damping, 0.0};
  for (double t : disturbance_onsets(cfg, rng)) add_burst(d, cfg.fs, t, b);
  return d;
}

std::vector<double> generate_noise(const SimConfig& cfg, CounterRng& rng) {
  cfg.validate();
  std::vector<double> n(cfg.sample_count(), 0.0);
  if (cfg.noise_sigma == 0.0) return n;
  for (auto& x : n) x = cfg.noise_sigma * rng.normal();
  return n;
}

MixtureSignal generate_mixture(const SimConfig& cfg) {
  cfg.validate();
  MixtureSignal m;
  m.fs = cfg.fs;
  m.config = cfg;
  CounterRng dist_rng(derive_seed(cfg.rng_seed, "disturbance"));
  CounterRng noise_rng(derive_seed(cfg.rng_seed, "noise"));
  m.s = generate_soi(cfg);
  m.d = generate_disturbance(cfg, dist_rng);
  m.n = generate_noise(cfg, noise_rng);
  m.y.resize(m.s.size());
  for (std::size_t k = 0; k < m.y.size(); ++k) m.y[k] = m.s[k] + m.d[k] + m.n[k];
  return m;
}

double measure_snr(std::span<const double> s, std::span<const double> noise) {
  if (s.size() != noise.size()) throw DataError("measure_snr: length mismatch");
  double es = 0.0;
  double en = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    es += s[k] * s[k];
    en += noise[k] * noise[k];
  }
  if (en == 0.0) throw NumericalError("measure_snr: noise has zero norm");
  return 10.0 * std::log10(es / en);
}

double measure_snr(const MixtureSignal& m) {
  std::vector<double> dn(m.d.size());
  for (std::size_t k = 0; k < dn.size(); ++k) dn[k] = m.d[k] + m.n[k];
  return measure_snr(m.s, dn);
}

std::vector<double> sigma_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) throw ConfigError("sigma_grid: need step > 0 and hi >= lo");
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> grid(count);
  // Integer stepping with rounding to 1e-12 keeps labels like 0.7 exact.
  for (std::size_t k = 0; k < count; ++k) {
    grid[k] = std::round((lo + static_cast<double>(k) * step) * 1e12) / 1e12;
  }
  return grid;
}

}  // namespace bearingntf
