// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bearingntf/random.hpp"

namespace bearingntf {

// Synthetic bearing vibration y(t) = s(t) + d(t) + n(t):
//   s  cyclic damped-sinusoid bursts at the fault frequency (signal of interest),
//   d  the same burst shape at random onsets and another carrier,
//   n  zero-mean Gaussian white noise.
struct SimConfig {
  double fs = 25000.0;        // Hz
  double duration = 60.0;     // s
  double soi_amplitude = 3.0;
  double fault_freq = 30.0;   // Hz, 1/T_p
  double soi_carrier = 2500.0;
  double soi_damping = 1000.0;  // 1/s
  double soi_phase = 0.0;       // rad
  double dist_amplitude = 5.0;
  double dist_carrier = 6000.0;
  double dist_damping = 1000.0;
  int dist_count = 30;
  double noise_sigma = 0.5;
  std::uint64_t rng_seed = 0;

  std::size_t sample_count() const;
  // Throws ConfigError on an invalid parameterization.
  void validate() const;
};

struct MixtureSignal {
  std::vector<double> y, s, d, n;
  double fs = 0.0;
  SimConfig config;
};

// Single causal burst amp * exp(-damping*t) * sin(2*pi*carrier*t + phase), t >= 0.
struct Burst {
  double amplitude;
  double carrier;
  double damping;
  double phase;
};

// Adds the burst with onset time `onset` (seconds) into `out` sampled at fs.
// The tail is cut once the envelope falls below 1e-13 of its peak.
void add_burst(std::span<double> out, double fs, double onset, const Burst& burst);

// Onset times m*T_p, m = 0, 1, ... strictly inside [0, duration).
std::vector<double> soi_onsets(const SimConfig& cfg);
std::vector<double> generate_soi(const SimConfig& cfg);

// dist_count onsets drawn uniformly on [0, duration), returned sorted.
std::vector<double> disturbance_onsets(const SimConfig& cfg, CounterRng& rng);
std::vector<double> generate_disturbance(const SimConfig& cfg, CounterRng& rng);

std::vector<double> generate_noise(const SimConfig& cfg, CounterRng& rng);

// Disturbance and noise use independent streams derived from cfg.rng_seed.
MixtureSignal generate_mixture(const SimConfig& cfg);

// 20*log10(||s|| / ||noise||), noise being the pre-summed d + n.
double measure_snr(std::span<const double> s, std::span<const double> noise);
double measure_snr(const MixtureSignal& m);

// sigma values from lo to hi inclusive in steps of `step` (0.5:0.1:3.0 -> 26).
std::vector<double> sigma_grid(double lo = 0.5, double hi = 3.0, double step = 0.1);

}  // namespace bearingntf
