// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bearingntf/diagnostics.hpp"
#include "bearingntf/factorization.hpp"
#include "bearingntf/signal_sim.hpp"
#include "bearingntf/spectrogram.hpp"

namespace bearingntf {

enum class Method { nmf, ntf };
std::string to_string(Method m);
Method method_from_string(const std::string& s);

enum class SignalSource { simulate, file };

struct PipelineConfig {
  SignalSource source = SignalSource::simulate;
  std::filesystem::path input_path;  // WAV or CSV when source == file
  std::optional<double> input_fs;    // required for CSV input
  SimConfig sim;
  StftParams stft;
  FitOptions fit;  // rank, iterations, tolerance, epsilon; beta is set per run
  std::vector<double> betas = {beta::eu, beta::kl, beta::is};
  double fold_len_s = 1.0;
  std::size_t fold_count = 40;
  TensorizeMode tensorize_mode = TensorizeMode::per_fold;
  double fault_freq = 30.0;
  std::size_t m1 = 6;
  std::vector<double> sigmas = sigma_grid();
  std::vector<std::uint64_t> seeds = {0};
  std::uint64_t master_seed = 0;
  std::filesystem::path out_dir;  // empty: nothing is written
  std::size_t workers = 1;

  void validate() const;
};

// Defaults for recorded signals: 50 kHz, first second for NMF, 40 one-second
// folds for NTF.
PipelineConfig real_signal_defaults(const std::filesystem::path& wav);

struct PipelineResult {
  Method method = Method::nmf;
  double beta = beta::eu;
  DiagnosticReport report;
  FactorSet factors;
  std::vector<std::string> stages;  // executed stage names, in order
  std::vector<double> freq_axis;    // Hz per row of W
  double frame_rate = 0.0;          // Hz, sampling rate of the H profiles
};

// Spectrogram of the first fold_len_s seconds -> NMF -> skewness selection ->
// profile spectrum -> SBI.
PipelineResult run_nmf_pipeline(std::span<const double> signal, const PipelineConfig& cfg,
                                const FitOptions& opts);

// fold_count folds -> per-fold spectrogram tensor -> NTF -> selection on H ->
// profile spectrum -> SBI. V is kept in the factors but not analysed.
PipelineResult run_ntf_pipeline(std::span<const double> signal, const PipelineConfig& cfg,
                                const FitOptions& opts);

// Loads (or simulates, at cfg.sim) the configured signal; fs in cfg.stft is
// replaced by the signal's rate.
std::vector<double> load_pipeline_signal(PipelineConfig& cfg);

struct SweepRecord {
  double sigma = 0.0;
  std::uint64_t seed = 0;
  double snr_db = 0.0;
  Method method = Method::nmf;
  double beta = beta::eu;
  std::size_t selected_component = 0;
  double sbi = 0.0;
  double freq_peak_hz = 0.0;     // argmax of the selected W column
  double profile_peak_hz = 0.0;  // largest non-DC peak of the profile spectrum
  std::size_t iterations = 0;
  bool converged = false;
  std::string error;  // non-empty if the case failed
};

struct SbiTableRow {
  double sigma = 0.0;
  double median_snr_db = 0.0;
  // key "<method>_<beta>" (e.g. "ntf_eu") -> median SBI over seeds
  std::map<std::string, double> median_sbi;
};

struct SweepReport {
  std::vector<SweepRecord> records;
  std::map<std::string, NoiseMaps> maps;  // key "<method>_<beta>", first seed per sigma
  std::vector<SbiTableRow> sbi_table;     // decreasing SNR
};

std::string case_key(Method m, double beta);

// Progress callback receives (finished replicates, total replicates).
using SweepProgress = std::function<void(std::size_t, std::size_t)>;

// For every sigma and seed: simulate, then run both pipelines for every beta.
// Replicates run on cfg.workers threads; results are merged in grid order.
// A failing fit is kept as a record with `error` set.
SweepReport run_sweep(const PipelineConfig& cfg, const SweepProgress& progress = {});

// Writes maps, SBI table and records under dir; per-case outputs are written
// by run_sweep itself when cfg.out_dir is set.
void write_sweep_outputs(const SweepReport& rep, const std::filesystem::path& dir);

// Per-run export: W.csv, H.csv, V.csv (NTF), history.json, report.json,
// spectrum.csv.
void write_pipeline_outputs(const PipelineResult& r, const std::filesystem::path& dir);

double median(std::vector<double> v);

}  // namespace bearingntf
