// SPDX-License-Identifier: Apache-2.0
// bearingntf: simulate, spectrogram, factorize, diagnose and sweep from the
// command line. Exit codes: 0 ok, 1 usage/config error, 2 data error,
// 3 numerical failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "bearingntf/diagnostics.hpp"
#include "bearingntf/error.hpp"
#include "bearingntf/factorization.hpp"
#include "bearingntf/json_io.hpp"
#include "bearingntf/pipeline.hpp"
#include "bearingntf/signal_io.hpp"
#include "bearingntf/signal_sim.hpp"
#include "bearingntf/spectrogram.hpp"
#include "bearingntf/tensor_io.hpp"

namespace fs = std::filesystem;
using namespace bearingntf;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  std::string out = ".";
  std::size_t workers = 1;
  std::string config;
};

template <typename T>
void override_if(const CLI::Option* opt, T& target, const T& value) {
  if (opt->count() > 0) target = value;
}

struct StftFlags {
  std::size_t window = 128;
  std::size_t overlap = 100;
  std::size_t nfft = 512;
  std::string window_kind = "hamming";
  double fold_seconds = 1.0;
  std::size_t folds = 40;
  CLI::Option* o_window = nullptr;
  CLI::Option* o_overlap = nullptr;
  CLI::Option* o_nfft = nullptr;
  CLI::Option* o_kind = nullptr;
  CLI::Option* o_fold_seconds = nullptr;
  CLI::Option* o_folds = nullptr;

  void add(CLI::App* app) {
    o_window = app->add_option("--window", window, "STFT window length (samples)");
    o_overlap = app->add_option("--overlap", overlap, "STFT overlap (samples)");
    o_nfft = app->add_option("--nfft", nfft, "DFT points");
    o_kind = app->add_option("--window-kind", window_kind, "hamming | hann | rect");
    o_fold_seconds = app->add_option("--fold-seconds", fold_seconds, "fold length (s)");
    o_folds = app->add_option("--folds", folds, "number of folds");
  }

  void apply(PipelineConfig& cfg) const {
    override_if(o_window, cfg.stft.window_len, window);
    override_if(o_overlap, cfg.stft.overlap, overlap);
    override_if(o_nfft, cfg.stft.nfft, nfft);
    if (o_kind->count()) cfg.stft.window = window_from_string(window_kind);
    override_if(o_fold_seconds, cfg.fold_len_s, fold_seconds);
    override_if(o_folds, cfg.fold_count, folds);
  }
};

struct FitFlags {
  std::string method = "ntf";
  std::string beta = "eu";
  std::size_t rank = 2;
  std::size_t max_iters = 100;
  double tol = 1e-5;
  CLI::Option* o_rank = nullptr;
  CLI::Option* o_iters = nullptr;
  CLI::Option* o_tol = nullptr;

  void add(CLI::App* app, bool with_method) {
    if (with_method) {
      app->add_option("--method", method, "nmf | ntf")->check(CLI::IsMember({"nmf", "ntf"}));
      app->add_option("--beta", beta, "eu | kl | is");
    }
    o_rank = app->add_option("--rank", rank, "decomposition rank J");
    o_iters = app->add_option("--max-iters", max_iters, "maximum MU iterations");
    o_tol = app->add_option("--tol", tol, "stop when the normalized residual changes by less");
  }

  void apply(PipelineConfig& cfg) const {
    override_if(o_rank, cfg.fit.rank, rank);
    override_if(o_iters, cfg.fit.max_iters, max_iters);
    override_if(o_tol, cfg.fit.tol, tol);
  }
};

PipelineConfig base_config(const Globals& g, const CLI::App& app) {
  PipelineConfig cfg;
  if (!g.config.empty()) from_json(read_json(g.config), cfg);
  if (app.get_option("--seed")->count()) {
    cfg.master_seed = g.seed;
    cfg.fit.seed = g.seed;
    cfg.sim.rng_seed = g.seed;
  }
  if (app.get_option("--out")->count() || cfg.out_dir.empty()) cfg.out_dir = g.out;
  if (app.get_option("--workers")->count()) cfg.workers = g.workers;
  return cfg;
}

void print_warnings(const LoadedSignal& s) {
  for (const auto& w : s.warnings) std::cerr << "warning: " << w << '\n';
}

int cmd_simulate(const Globals& g, const CLI::App& app, const SimConfig& flags,
                 const std::vector<const CLI::Option*>& set) {
  PipelineConfig cfg = base_config(g, app);
  SimConfig sim = cfg.sim;
  // Per-flag override of the config file values.
  const SimConfig* src = &flags;
  if (set[0]->count()) sim.noise_sigma = src->noise_sigma;
  if (set[1]->count()) sim.duration = src->duration;
  if (set[2]->count()) sim.fs = src->fs;
  if (set[3]->count()) sim.dist_count = src->dist_count;
  if (set[4]->count()) sim.soi_damping = src->soi_damping;
  if (set[5]->count()) sim.dist_damping = src->dist_damping;
  if (set[6]->count()) sim.soi_amplitude = src->soi_amplitude;
  if (set[7]->count()) sim.fault_freq = src->fault_freq;
  sim.validate();

  const auto mix = generate_mixture(sim);
  const fs::path out = cfg.out_dir;
  fs::create_directories(out);
  write_wav_float(out / "y.wav", mix.y, mix.fs);
  write_wav_float(out / "s.wav", mix.s, mix.fs);
  write_wav_float(out / "d.wav", mix.d, mix.fs);
  write_wav_float(out / "n.wav", mix.n, mix.fs);
  const double snr = measure_snr(mix);
  write_json(out / "simulate.json", json{{"config", sim}, {"snr_db", snr}});
  std::cout << "wrote " << (out / "y.wav").string() << " (" << mix.y.size()
            << " samples), SNR " << snr << " dB\n";
  return 0;
}

int cmd_spectrogram(const Globals& g, const CLI::App& app, const std::string& input,
                    std::optional<double> fs_flag, const StftFlags& sf, const std::string& format,
                    bool tensor_mode) {
  PipelineConfig cfg = base_config(g, app);
  sf.apply(cfg);
  auto sig = load_signal(input, fs_flag);
  print_warnings(sig);
  cfg.stft.fs = sig.fs;
  const fs::path out = cfg.out_dir;
  fs::create_directories(out);
  if (!tensor_mode) {
    const auto sg = stft_spectrogram(sig.samples, cfg.stft);
    write_matrix_csv(out / "spectrogram.csv", sg.values);
    Matrix axis(sg.freq_axis.size(), 1, sg.freq_axis);
    write_table_csv(out / "freq_axis.csv", {"freq_hz"}, axis);
    std::cout << "spectrogram " << sg.values.rows() << "x" << sg.values.cols() << " -> "
              << (out / "spectrogram.csv").string() << '\n';
    return 0;
  }
  const auto t = tensorize(sig.samples, cfg.stft, cfg.fold_len_s, cfg.fold_count, cfg.tensorize_mode);
  if (format == "csv") {
    write_matrix_csv(out / "tensor_mode1.csv", unfold(t, Mode::one));
  } else {
    write_tensor(out / "tensor.bntf", t);
  }
  std::cout << "tensor " << t.dims().I << "x" << t.dims().P << "x" << t.dims().L << " -> "
            << out.string() << '\n';
  return 0;
}

int cmd_factorize(const Globals& g, const CLI::App& app, const std::string& input,
                  const std::string& kind, std::optional<double> fs_flag, const StftFlags& sf,
                  const FitFlags& ff) {
  PipelineConfig cfg = base_config(g, app);
  sf.apply(cfg);
  ff.apply(cfg);
  FitOptions opts = cfg.fit;
  opts.beta = beta_from_string(ff.beta);
  if (app.get_option("--seed")->count()) opts.seed = g.seed;
  const Method method = method_from_string(ff.method);

  std::string k = kind;
  if (k == "auto") {
    if (is_tensor_file(input)) k = "tensor";
    else if (fs::path(input).extension() == ".wav") k = "signal";
    else k = "matrix";
  }
  const fs::path out = cfg.out_dir;
  if (k == "signal") {
    auto sig = load_signal(input, fs_flag);
    print_warnings(sig);
    cfg.stft.fs = sig.fs;
    const auto r = method == Method::nmf ? run_nmf_pipeline(sig.samples, cfg, opts)
                                         : run_ntf_pipeline(sig.samples, cfg, opts);
    write_pipeline_outputs(r, out);
    std::cout << to_string(method) << "/" << beta_name(opts.beta) << ": " << r.factors.iterations
              << " iterations, selected component " << r.report.selected_component << ", SBI "
              << r.report.sbi << '\n';
    return 0;
  }

  FactorSet f;
  if (k == "tensor") {
    const auto t = read_tensor(fs::path(input));
    if (method == Method::nmf) f = nmf(unfold(t, Mode::one), opts);
    else f = ntf(t, opts);
  } else if (k == "matrix") {
    const auto m = read_matrix_csv(fs::path(input));
    if (method == Method::ntf) throw ConfigError("factorize: NTF needs a tensor or signal input");
    f = nmf(m, opts);
  } else {
    throw ConfigError("factorize: unknown --input-kind " + kind);
  }
  fs::create_directories(out);
  write_matrix_csv(out / "W.csv", f.W);
  write_matrix_csv(out / "H.csv", f.H);
  if (f.V) write_matrix_csv(out / "V.csv", *f.V);
  json hist = f.history;
  hist["iterations"] = f.iterations;
  hist["converged"] = f.converged;
  hist["method"] = to_string(method);
  hist["beta"] = beta_name(opts.beta);
  write_json(out / "history.json", hist);
  std::cout << to_string(method) << "/" << beta_name(opts.beta) << ": " << f.iterations
            << " iterations -> " << out.string() << '\n';
  return 0;
}

int cmd_diagnose(const Globals& g, const CLI::App& app, const std::string& w_path,
                 const std::string& h_path, double frame_rate, double fault_freq, std::size_t m1) {
  PipelineConfig cfg = base_config(g, app);
  const auto w = read_matrix_csv(fs::path(w_path));
  const auto h = read_matrix_csv(fs::path(h_path));
  const auto rep = diagnose(w, h, frame_rate, fault_freq, m1);
  const fs::path out = cfg.out_dir;
  fs::create_directories(out);
  json j = rep;
  j["frame_rate"] = frame_rate;
  write_json(out / "report.json", j);
  const auto f = rep.profile_spectrum.freq_axis();
  Matrix sp(f.size(), 2);
  for (std::size_t k = 0; k < f.size(); ++k) {
    sp(k, 0) = f[k];
    sp(k, 1) = rep.profile_spectrum.magnitude[k];
  }
  write_table_csv(out / "spectrum.csv", {"freq_hz", "magnitude"}, sp);
  std::cout << "selected component " << rep.selected_component << ", SBI " << rep.sbi << '\n';
  return 0;
}

struct SweepFlags {
  double sigma_min = 0.5, sigma_max = 3.0, sigma_step = 0.1;
  std::vector<double> sigmas;
  std::size_t replicates = 1;
  std::vector<std::string> betas;
  double duration = 60.0;
  CLI::Option* o_min = nullptr;
  CLI::Option* o_max = nullptr;
  CLI::Option* o_step = nullptr;
  CLI::Option* o_sigmas = nullptr;
  CLI::Option* o_reps = nullptr;
  CLI::Option* o_betas = nullptr;
  CLI::Option* o_duration = nullptr;
};

int cmd_sweep(const Globals& g, const CLI::App& app, const SweepFlags& sw, const StftFlags& sf,
              const FitFlags& ff) {
  PipelineConfig cfg = base_config(g, app);
  sf.apply(cfg);
  ff.apply(cfg);
  if (sw.o_sigmas->count()) {
    cfg.sigmas = sw.sigmas;
  } else if (sw.o_min->count() || sw.o_max->count() || sw.o_step->count()) {
    cfg.sigmas = sigma_grid(sw.sigma_min, sw.sigma_max, sw.sigma_step);
  }
  if (sw.o_reps->count()) {
    cfg.seeds.clear();
    for (std::size_t k = 0; k < sw.replicates; ++k) cfg.seeds.push_back(k);
  }
  if (sw.o_betas->count()) {
    cfg.betas.clear();
    for (const auto& b : sw.betas) cfg.betas.push_back(beta_from_string(b));
  }
  if (sw.o_duration->count()) cfg.sim.duration = sw.duration;
  cfg.validate();

  const fs::path out = cfg.out_dir;
  fs::create_directories(out);
  write_json(out / "config.json", cfg);
  const auto rep = run_sweep(cfg, [](std::size_t done, std::size_t total) {
    std::cerr << "\rsweep " << done << "/" << total << std::flush;
  });
  std::cerr << '\n';
  write_sweep_outputs(rep, out);
  std::size_t failed = 0;
  for (const auto& r : rep.records) failed += r.error.empty() ? 0 : 1;
  std::cout << rep.records.size() << " records (" << failed << " failed) -> " << out.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bearing fault detection with non-negative tensor/matrix factorization"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "master random seed");
  app.add_option("--out", g.out, "output directory");
  app.add_option("--workers", g.workers, "worker threads for sweeps");
  app.add_option("--config", g.config, "JSON pipeline configuration")->check(CLI::ExistingFile);

  // simulate
  auto* sim = app.add_subcommand("simulate", "generate a synthetic mixture and its components");
  sim->fallthrough();
  SimConfig simflags;
  std::vector<const CLI::Option*> simset = {
      sim->add_option("--sigma", simflags.noise_sigma, "Gaussian noise standard deviation"),
      sim->add_option("--duration", simflags.duration, "seconds"),
      sim->add_option("--fs", simflags.fs, "sampling rate (Hz)"),
      sim->add_option("--dist-count", simflags.dist_count, "number of random bursts"),
      sim->add_option("--soi-damping", simflags.soi_damping, "SOI damping (1/s)"),
      sim->add_option("--dist-damping", simflags.dist_damping, "disturbance damping (1/s)"),
      sim->add_option("--soi-amplitude", simflags.soi_amplitude, "SOI amplitude"),
      sim->add_option("--fault-freq", simflags.fault_freq, "fault frequency (Hz)")};

  // spectrogram
  auto* spec = app.add_subcommand("spectrogram", "spectrogram CSV or fold tensor of a signal");
  spec->fallthrough();
  std::string spec_input;
  std::optional<double> spec_fs;
  std::string spec_format = "tensor";
  StftFlags spec_stft;
  spec->add_option("input", spec_input, "WAV or single-column CSV")->required();
  spec->add_option("--fs", spec_fs, "sample rate for CSV input");
  spec->add_option("--format", spec_format, "tensor | csv (tensor output only)")
      ->check(CLI::IsMember({"tensor", "csv"}));
  spec_stft.add(spec);

  // factorize
  auto* fac = app.add_subcommand("factorize", "NMF or NTF of a signal, tensor or matrix");
  fac->fallthrough();
  std::string fac_input;
  std::string fac_kind = "auto";
  std::optional<double> fac_fs;
  StftFlags fac_stft;
  FitFlags fac_fit;
  fac->add_option("input", fac_input, "WAV/CSV signal, tensor file or CSV matrix")->required();
  fac->add_option("--input-kind", fac_kind, "auto | signal | tensor | matrix")
      ->check(CLI::IsMember({"auto", "signal", "tensor", "matrix"}));
  fac->add_option("--fs", fac_fs, "sample rate for CSV signal input");
  fac_stft.add(fac);
  fac_fit.add(fac, true);

  // diagnose
  auto* dia = app.add_subcommand("diagnose", "skewness selection, profile spectrum and SBI");
  dia->fallthrough();
  std::string dia_w, dia_h;
  double dia_rate = 0.0, dia_fault = 30.0;
  std::size_t dia_m1 = 6;
  dia->add_option("--w-csv", dia_w, "W.csv (frequency profiles)")->required();
  dia->add_option("--h-csv", dia_h, "H.csv (time profiles)")->required();
  dia->add_option("--frame-rate", dia_rate, "profile sampling rate fs/hop (Hz)")->required();
  dia->add_option("--fault-freq", dia_fault, "fault frequency (Hz)");
  dia->add_option("--m1", dia_m1, "number of harmonics");

  // sweep
  auto* swp = app.add_subcommand("sweep", "SNR sweep over simulated mixtures");
  swp->fallthrough();
  SweepFlags sw;
  StftFlags sw_stft;
  FitFlags sw_fit;
  sw.o_min = swp->add_option("--sigma-min", sw.sigma_min, "first sigma");
  sw.o_max = swp->add_option("--sigma-max", sw.sigma_max, "last sigma");
  sw.o_step = swp->add_option("--sigma-step", sw.sigma_step, "sigma step");
  sw.o_sigmas = swp->add_option("--sigmas", sw.sigmas, "explicit sigma list");
  sw.o_reps = swp->add_option("--replicates", sw.replicates, "seeds per sigma (0..n-1)");
  sw.o_betas = swp->add_option("--betas", sw.betas, "subset of eu kl is");
  sw.o_duration = swp->add_option("--duration", sw.duration, "simulated seconds");
  sw_stft.add(swp);
  sw_fit.add(swp, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*sim) return cmd_simulate(g, app, simflags, simset);
    if (*spec) {
      return cmd_spectrogram(g, app, spec_input, spec_fs, spec_stft, spec_format,
                             spec_stft.o_folds->count() > 0 || spec_stft.o_fold_seconds->count() > 0);
    }
    if (*fac) return cmd_factorize(g, app, fac_input, fac_kind, fac_fs, fac_stft, fac_fit);
    if (*dia) return cmd_diagnose(g, app, dia_w, dia_h, dia_rate, dia_fault, dia_m1);
    if (*swp) return cmd_sweep(g, app, sw, sw_stft, sw_fit);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
