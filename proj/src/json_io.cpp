// SPDX-License-Identifier: Apache-2.0
#include "bearingntf/json_io.hpp"

#include <fstream>

#include "bearingntf/error.hpp"

namespace bearingntf {

namespace {

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) it->get_to(out);
}

}  // namespace

void to_json(json& j, const SimConfig& c) {
  j = json{{"fs", c.fs},
           {"duration", c.duration},
           {"soi_amplitude", c.soi_amplitude},
           {"fault_freq", c.fault_freq},
           {"soi_carrier", c.soi_carrier},
           {"soi_damping", c.soi_damping},
           {"soi_phase", c.soi_phase},
           {"dist_amplitude", c.dist_amplitude},
           {"dist_carrier", c.dist_carrier},
           {"dist_damping", c.dist_damping},
           {"dist_count", c.dist_count},
           {"noise_sigma", c.noise_sigma},
           {"rng_seed", c.rng_seed}};
}

void from_json(const json& j, SimConfig& c) {
  maybe(j, "fs", c.fs);
  maybe(j, "duration", c.duration);
  maybe(j, "soi_amplitude", c.soi_amplitude);
  maybe(j, "fault_freq", c.fault_freq);
  maybe(j, "soi_carrier", c.soi_carrier);
  maybe(j, "soi_damping", c.soi_damping);
  maybe(j, "soi_phase", c.soi_phase);
  maybe(j, "dist_amplitude", c.dist_amplitude);
  maybe(j, "dist_carrier", c.dist_carrier);
  maybe(j, "dist_damping", c.dist_damping);
  maybe(j, "dist_count", c.dist_count);
  maybe(j, "noise_sigma", c.noise_sigma);
  maybe(j, "rng_seed", c.rng_seed);
}

void to_json(json& j, const StftParams& p) {
  j = json{{"window_len", p.window_len},
           {"overlap", p.overlap},
           {"nfft", p.nfft},
           {"window", to_string(p.window)},
           {"fs", p.fs}};
}

void from_json(const json& j, StftParams& p) {
  maybe(j, "window_len", p.window_len);
  maybe(j, "overlap", p.overlap);
  maybe(j, "nfft", p.nfft);
  maybe(j, "fs", p.fs);
  if (j.contains("window")) p.window = window_from_string(j.at("window").get<std::string>());
}

void to_json(json& j, const FitOptions& o) {
  j = json{{"rank", o.rank},
           {"beta", o.beta},
           {"max_iters", o.max_iters},
           {"tol", o.tol},
           {"epsilon", o.epsilon},
           {"seed", o.seed},
           {"record_history", o.record_history},
           {"freeze_fold_weights", o.freeze_fold_weights}};
}

void from_json(const json& j, FitOptions& o) {
  maybe(j, "rank", o.rank);
  if (j.contains("beta")) {
    const auto& b = j.at("beta");
    o.beta = b.is_string() ? beta_from_string(b.get<std::string>()) : b.get<double>();
  }
  maybe(j, "max_iters", o.max_iters);
  maybe(j, "tol", o.tol);
  maybe(j, "epsilon", o.epsilon);
  maybe(j, "seed", o.seed);
  maybe(j, "record_history", o.record_history);
  maybe(j, "freeze_fold_weights", o.freeze_fold_weights);
}

void to_json(json& j, const PipelineConfig& c) {
  std::vector<std::string> betas;
  for (double b : c.betas) betas.push_back(beta_name(b));
  j = json{{"source", c.source == SignalSource::simulate ? "simulate" : "file"},
           {"input_path", c.input_path.string()},
           {"sim", c.sim},
           {"stft", c.stft},
           {"fit", c.fit},
           {"betas", betas},
           {"fold_len_s", c.fold_len_s},
           {"fold_count", c.fold_count},
           {"tensorize_mode",
            c.tensorize_mode == TensorizeMode::per_fold ? "per_fold" : "global_slice"},
           {"fault_freq", c.fault_freq},
           {"m1", c.m1},
           {"sigmas", c.sigmas},
           {"seeds", c.seeds},
           {"master_seed", c.master_seed},
           {"out_dir", c.out_dir.string()},
           {"workers", c.workers}};
  j["input_fs"] = c.input_fs ? json(*c.input_fs) : json(nullptr);
}

void from_json(const json& j, PipelineConfig& c) {
  if (j.contains("source")) {
    const auto s = j.at("source").get<std::string>();
    if (s == "simulate") c.source = SignalSource::simulate;
    else if (s == "file" || s == "wav") c.source = SignalSource::file;
    else throw ConfigError("config: source must be 'simulate' or 'file'");
  }
  if (j.contains("input_path")) c.input_path = j.at("input_path").get<std::string>();
  if (j.contains("input_fs") && !j.at("input_fs").is_null()) c.input_fs = j.at("input_fs").get<double>();
  if (j.contains("sim")) from_json(j.at("sim"), c.sim);
  if (j.contains("stft")) from_json(j.at("stft"), c.stft);
  if (j.contains("fit")) from_json(j.at("fit"), c.fit);
  if (j.contains("betas")) {
    c.betas.clear();
    for (const auto& b : j.at("betas")) {
      c.betas.push_back(b.is_string() ? beta_from_string(b.get<std::string>()) : b.get<double>());
    }
  }
  maybe(j, "fold_len_s", c.fold_len_s);
  maybe(j, "fold_count", c.fold_count);
  if (j.contains("tensorize_mode")) {
    const auto s = j.at("tensorize_mode").get<std::string>();
    if (s == "per_fold") c.tensorize_mode = TensorizeMode::per_fold;
    else if (s == "global_slice") c.tensorize_mode = TensorizeMode::global_slice;
    else throw ConfigError("config: tensorize_mode must be 'per_fold' or 'global_slice'");
  }
  maybe(j, "fault_freq", c.fault_freq);
  maybe(j, "m1", c.m1);
  maybe(j, "sigmas", c.sigmas);
  maybe(j, "seeds", c.seeds);
  maybe(j, "master_seed", c.master_seed);
  if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
  maybe(j, "workers", c.workers);
}

void to_json(json& j, const FitHistory& h) {
  j = json{{"objective", h.objective}, {"residual", h.residual}};
}

void from_json(const json& j, FitHistory& h) {
  maybe(j, "objective", h.objective);
  maybe(j, "residual", h.residual);
}

void to_json(json& j, const DiagnosticReport& r) {
  j = json{{"selected_component", r.selected_component},
           {"skewness", r.skewness},
           {"sbi", r.sbi},
           {"harmonics", r.harmonics},
           {"fault_freq", r.fault_freq},
           {"m1", r.m1},
           {"spectrum_bin_hz", r.profile_spectrum.bin_hz},
           {"spectrum", r.profile_spectrum.magnitude},
           {"frequency_profile", r.frequency_profile},
           {"time_profile", r.time_profile}};
}

void from_json(const json& j, DiagnosticReport& r) {
  maybe(j, "selected_component", r.selected_component);
  maybe(j, "skewness", r.skewness);
  maybe(j, "sbi", r.sbi);
  maybe(j, "harmonics", r.harmonics);
  maybe(j, "fault_freq", r.fault_freq);
  maybe(j, "m1", r.m1);
  maybe(j, "spectrum_bin_hz", r.profile_spectrum.bin_hz);
  maybe(j, "spectrum", r.profile_spectrum.magnitude);
  maybe(j, "frequency_profile", r.frequency_profile);
  maybe(j, "time_profile", r.time_profile);
}

void to_json(json& j, const SweepRecord& r) {
  j = json{{"sigma", r.sigma},
           {"seed", r.seed},
           {"snr_db", r.snr_db},
           {"method", to_string(r.method)},
           {"beta", beta_name(r.beta)},
           {"selected_component", r.selected_component},
           {"sbi", r.sbi},
           {"freq_peak_hz", r.freq_peak_hz},
           {"profile_peak_hz", r.profile_peak_hz},
           {"iterations", r.iterations},
           {"converged", r.converged},
           {"error", r.error}};
}

void from_json(const json& j, SweepRecord& r) {
  maybe(j, "sigma", r.sigma);
  maybe(j, "seed", r.seed);
  maybe(j, "snr_db", r.snr_db);
  if (j.contains("method")) r.method = method_from_string(j.at("method").get<std::string>());
  if (j.contains("beta")) r.beta = beta_from_string(j.at("beta").get<std::string>());
  maybe(j, "selected_component", r.selected_component);
  maybe(j, "sbi", r.sbi);
  maybe(j, "freq_peak_hz", r.freq_peak_hz);
  maybe(j, "profile_peak_hz", r.profile_peak_hz);
  maybe(j, "iterations", r.iterations);
  maybe(j, "converged", r.converged);
  maybe(j, "error", r.error);
}

json read_json(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open " + path.string());
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path.string());
  f << j.dump(2) << '\n';
}

}  // namespace bearingntf
