// SPDX-License-Identifier: Apache-2.0
#include "bearingntf/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "bearingntf/error.hpp"
#include "bearingntf/json_io.hpp"
#include "bearingntf/random.hpp"
#include "bearingntf/signal_io.hpp"
#include "bearingntf/tensor_io.hpp"

namespace bearingntf {

std::string to_string(Method m) { return m == Method::nmf ? "nmf" : "ntf"; }

Method method_from_string(const std::string& s) {
  if (s == "nmf" || s == "NMF") return Method::nmf;
  if (s == "ntf" || s == "NTF") return Method::ntf;
  throw ConfigError("unknown method: " + s + " (expected nmf or ntf)");
}

std::string case_key(Method m, double beta) { return to_string(m) + "_" + beta_name(beta); }

void PipelineConfig::validate() const {
  stft.validate();
  fit.validate();
  if (betas.empty()) throw ConfigError("pipeline: beta list is empty");
  for (double b : betas) {
    FitOptions o = fit;
    o.beta = b;
    o.validate();
  }
  if (!(fold_len_s > 0.0) || fold_count == 0) throw ConfigError("pipeline: bad fold settings");
  if (!(fault_freq > 0.0) || m1 == 0) throw ConfigError("pipeline: bad fault frequency or m1");
  if (workers == 0) throw ConfigError("pipeline: workers must be >= 1");
  if (source == SignalSource::file && !std::filesystem::exists(input_path)) {
    throw DataError("pipeline: input file does not exist: " + input_path.string());
  }
  if (source == SignalSource::simulate) {
    sim.validate();
    if (fold_count * fold_len_s > sim.duration + 1e-9) {
      throw ConfigError("pipeline: fold_count * fold_len_s exceeds the simulated duration");
    }
  }
}

PipelineConfig real_signal_defaults(const std::filesystem::path& wav) {
  PipelineConfig c;
  c.source = SignalSource::file;
  c.input_path = wav;
  c.stft.fs = 50000.0;
  c.fold_len_s = 1.0;
  c.fold_count = 40;
  return c;
}

namespace {

std::size_t argmax(std::span<const double> x) {
  return static_cast<std::size_t>(std::distance(x.begin(), std::max_element(x.begin(), x.end())));
}

std::vector<double> bin_axis(const StftParams& p) {
  std::vector<double> f(p.bins());
  for (std::size_t k = 0; k < f.size(); ++k) {
    f[k] = static_cast<double>(k) * p.fs / static_cast<double>(p.nfft);
  }
  return f;
}

void finish(PipelineResult& r, const PipelineConfig& cfg) {
  r.stages.push_back("select_component");
  r.report = diagnose(r.factors.W, r.factors.H, r.frame_rate, cfg.fault_freq, cfg.m1);
  r.stages.push_back("time_profile_spectrum");
  r.stages.push_back("sbi");
}

}  // namespace

PipelineResult run_nmf_pipeline(std::span<const double> signal, const PipelineConfig& cfg,
                                const FitOptions& opts) {
  const std::size_t n = fold_samples(cfg.stft, cfg.fold_len_s);
  if (signal.size() < n) {
    throw DataError("nmf pipeline: signal shorter than the " + std::to_string(cfg.fold_len_s) +
                    " s excerpt");
  }
  PipelineResult r;
  r.method = Method::nmf;
  r.beta = opts.beta;
  r.stages.push_back("excerpt");
  const auto sg = stft_spectrogram(signal.first(n), cfg.stft);
  r.stages.push_back("spectrogram");
  r.factors = nmf(sg.values, opts);
  r.stages.push_back("nmf");
  r.freq_axis = sg.freq_axis;
  r.frame_rate = cfg.stft.frame_rate();
  finish(r, cfg);
  return r;
}

PipelineResult run_ntf_pipeline(std::span<const double> signal, const PipelineConfig& cfg,
                                const FitOptions& opts) {
  PipelineResult r;
  r.method = Method::ntf;
  r.beta = opts.beta;
  const auto y = tensorize(signal, cfg.stft, cfg.fold_len_s, cfg.fold_count, cfg.tensorize_mode);
  r.stages.push_back("tensorize");
  r.factors = ntf(y, opts);
  r.stages.push_back("ntf");
  r.freq_axis = bin_axis(cfg.stft);
  r.frame_rate = cfg.stft.frame_rate();
  finish(r, cfg);
  return r;
}

std::vector<double> load_pipeline_signal(PipelineConfig& cfg) {
  if (cfg.source == SignalSource::simulate) {
    cfg.stft.fs = cfg.sim.fs;
    return generate_mixture(cfg.sim).y;
  }
  auto s = load_signal(cfg.input_path, cfg.input_fs);
  cfg.stft.fs = s.fs;
  return std::move(s.samples);
}

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

void write_pipeline_outputs(const PipelineResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_matrix_csv(dir / "W.csv", r.factors.W);
  write_matrix_csv(dir / "H.csv", r.factors.H);
  if (r.factors.V) write_matrix_csv(dir / "V.csv", *r.factors.V);
  json hist = r.factors.history;
  hist["iterations"] = r.factors.iterations;
  hist["converged"] = r.factors.converged;
  write_json(dir / "history.json", hist);
  json rep = r.report;
  rep["method"] = to_string(r.method);
  rep["beta"] = beta_name(r.beta);
  rep["frame_rate"] = r.frame_rate;
  rep["stages"] = r.stages;
  write_json(dir / "report.json", rep);

  const auto& spec = r.report.profile_spectrum;
  Matrix sp(spec.magnitude.size(), 2);
  const auto f = spec.freq_axis();
  for (std::size_t k = 0; k < f.size(); ++k) {
    sp(k, 0) = f[k];
    sp(k, 1) = spec.magnitude[k];
  }
  write_table_csv(dir / "spectrum.csv", {"freq_hz", "magnitude"}, sp);
  Matrix profiles(r.report.time_profile.size(), 1, r.report.time_profile);
  write_table_csv(dir / "time_profile.csv", {"h"}, profiles);
  Matrix fprof(r.report.frequency_profile.size(), 1, r.report.frequency_profile);
  write_table_csv(dir / "frequency_profile.csv", {"w"}, fprof);
}

namespace {

struct Replicate {
  std::size_t sigma_index = 0;
  std::size_t seed_index = 0;
};

struct ReplicateResult {
  double snr_db = 0.0;
  std::vector<SweepRecord> records;
  std::vector<NoiseMapCase> map_cases;  // parallel to records
};

std::string replicate_label(double sigma, std::uint64_t seed) {
  return "sigma=" + format_double(sigma) + "/seed=" + std::to_string(seed);
}

ReplicateResult run_replicate(const PipelineConfig& cfg, double sigma, std::uint64_t seed) {
  ReplicateResult out;
  const std::string label = replicate_label(sigma, seed);
  SimConfig sim = cfg.sim;
  sim.noise_sigma = sigma;
  sim.rng_seed = derive_seed(cfg.master_seed, "mix/" + label);
  const auto mix = generate_mixture(sim);
  out.snr_db = measure_snr(mix);

  PipelineConfig pc = cfg;
  pc.stft.fs = sim.fs;
  for (Method method : {Method::nmf, Method::ntf}) {
    for (double b : cfg.betas) {
      SweepRecord rec;
      rec.sigma = sigma;
      rec.seed = seed;
      rec.snr_db = out.snr_db;
      rec.method = method;
      rec.beta = b;
      NoiseMapCase mc;
      mc.sigma = sigma;
      mc.snr_db = out.snr_db;
      try {
        FitOptions opts = cfg.fit;
        opts.beta = b;
        opts.record_history = false;
        opts.seed = derive_seed(cfg.master_seed, "fit/" + label + "/" + case_key(method, b));
        const auto r = method == Method::nmf ? run_nmf_pipeline(mix.y, pc, opts)
                                             : run_ntf_pipeline(mix.y, pc, opts);
        rec.selected_component = r.report.selected_component;
        rec.sbi = r.report.sbi;
        rec.freq_peak_hz = r.freq_axis[argmax(r.report.frequency_profile)];
        rec.profile_peak_hz =
            static_cast<double>(peak_bin(r.report.profile_spectrum)) * r.report.profile_spectrum.bin_hz;
        rec.iterations = r.factors.iterations;
        rec.converged = r.factors.converged;
        mc.frequency_profile = r.report.frequency_profile;
        mc.time_profile = r.report.time_profile;
        if (!cfg.out_dir.empty()) {
          const auto dir = cfg.out_dir / "cases" /
                           ("sigma_" + format_short(sigma) + "_seed_" + std::to_string(seed)) /
                           case_key(method, b);
          write_pipeline_outputs(r, dir);
        }
      } catch (const std::exception& e) {
        rec.error = e.what();
      }
      out.records.push_back(std::move(rec));
      out.map_cases.push_back(std::move(mc));
    }
  }
  return out;
}

}  // namespace

SweepReport run_sweep(const PipelineConfig& cfg, const SweepProgress& progress) {
  cfg.validate();
  if (cfg.sigmas.empty() || cfg.seeds.empty()) throw ConfigError("sweep: empty sigma or seed grid");

  std::vector<Replicate> work;
  for (std::size_t s = 0; s < cfg.sigmas.size(); ++s)
    for (std::size_t k = 0; k < cfg.seeds.size(); ++k) work.push_back({s, k});

  std::vector<ReplicateResult> results(work.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  auto worker = [&] {
    for (std::size_t idx = next++; idx < work.size(); idx = next++) {
      const auto& w = work[idx];
      results[idx] = run_replicate(cfg, cfg.sigmas[w.sigma_index], cfg.seeds[w.seed_index]);
      const std::size_t finished = ++done;
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(finished, work.size());
      }
    }
  };
  const std::size_t nthreads = std::min(cfg.workers, work.size());
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }

  SweepReport rep;
  std::map<std::string, std::vector<NoiseMapCase>> map_cases;
  for (std::size_t idx = 0; idx < work.size(); ++idx) {
    auto& res = results[idx];
    for (std::size_t k = 0; k < res.records.size(); ++k) {
      const auto& rec = res.records[k];
      // Maps use the first seed of each sigma; failed cases are skipped.
      if (work[idx].seed_index == 0 && rec.error.empty()) {
        map_cases[case_key(rec.method, rec.beta)].push_back(res.map_cases[k]);
      }
      rep.records.push_back(rec);
    }
  }

  StftParams axis_params = cfg.stft;
  axis_params.fs = cfg.sim.fs;
  const auto faxis = bin_axis(axis_params);
  std::vector<double> taxis(axis_params.frame_count(fold_samples(axis_params, cfg.fold_len_s)));
  for (std::size_t k = 0; k < taxis.size(); ++k) {
    taxis[k] = (static_cast<double>(k * axis_params.hop()) + 0.5 * axis_params.window_len) /
               axis_params.fs;
  }
  for (auto& [key, cases] : map_cases) {
    const bool time_axis_fits = !cases.empty() && cases.front().time_profile.size() == taxis.size();
    rep.maps[key] = build_noise_maps(cases, faxis,
                                     time_axis_fits ? std::span<const double>(taxis)
                                                    : std::span<const double>{});
  }

  for (double sigma : cfg.sigmas) {
    SbiTableRow row;
    row.sigma = sigma;
    std::vector<double> snrs;
    std::map<std::string, std::vector<double>> sbis;
    for (const auto& rec : rep.records) {
      if (rec.sigma != sigma) continue;
      if (rec.method == Method::nmf && rec.beta == cfg.betas.front()) snrs.push_back(rec.snr_db);
      if (rec.error.empty()) sbis[case_key(rec.method, rec.beta)].push_back(rec.sbi);
    }
    row.median_snr_db = median(snrs);
    for (auto& [key, vals] : sbis) row.median_sbi[key] = median(vals);
    rep.sbi_table.push_back(std::move(row));
  }
  std::stable_sort(rep.sbi_table.begin(), rep.sbi_table.end(),
                   [](const SbiTableRow& a, const SbiTableRow& b) {
                     return a.median_snr_db > b.median_snr_db;
                   });
  return rep;
}

void write_sweep_outputs(const SweepReport& rep, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [key, maps] : rep.maps) {
    write_table_csv(dir / ("freqmap_" + key + ".csv"), maps.frequency.labels(), maps.frequency.values);
    write_table_csv(dir / ("timemap_" + key + ".csv"), maps.time.labels(), maps.time.values);
    Matrix axes(maps.frequency.axis.size(), 1, maps.frequency.axis);
    write_table_csv(dir / ("freqmap_" + key + "_axis_hz.csv"), {"freq_hz"}, axes);
    Matrix taxes(maps.time.axis.size(), 1, maps.time.axis);
    write_table_csv(dir / ("timemap_" + key + "_axis_s.csv"), {"time_s"}, taxes);
  }

  std::vector<std::string> keys;
  if (!rep.sbi_table.empty()) {
    for (const auto& [key, v] : rep.sbi_table.front().median_sbi) keys.push_back(key);
  }
  std::vector<std::string> header = {"sigma", "median_snr_db"};
  for (const auto& k : keys) header.push_back("sbi_" + k);
  Matrix table(rep.sbi_table.size(), header.size(), std::nan(""));
  for (std::size_t r = 0; r < rep.sbi_table.size(); ++r) {
    const auto& row = rep.sbi_table[r];
    table(r, 0) = row.sigma;
    table(r, 1) = row.median_snr_db;
    for (std::size_t k = 0; k < keys.size(); ++k) {
      if (auto it = row.median_sbi.find(keys[k]); it != row.median_sbi.end()) table(r, 2 + k) = it->second;
    }
  }
  write_table_csv(dir / "sbi_vs_snr.csv", header, table);

  json records = json::array();
  for (const auto& rec : rep.records) records.push_back(rec);
  write_json(dir / "sweep.json", json{{"records", records}});
}

}  // namespace bearingntf
