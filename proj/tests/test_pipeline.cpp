// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"

#include "bearingntf/error.hpp"
#include "bearingntf/json_io.hpp"
#include "bearingntf/pipeline.hpp"
#include "bearingntf/signal_io.hpp"
#include "bearingntf/tensor_io.hpp"

using namespace bearingntf;
namespace fs = std::filesystem;

namespace {

// A short simulation keeps these tests fast: 3 s signal, three 1 s folds.
PipelineConfig small_config() {
  PipelineConfig c;
  c.sim.duration = 3.0;
  c.sim.dist_count = 2;
  c.fold_count = 3;
  c.sigmas = {0.5};
  c.seeds = {0};
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

template <typename T>
void put(std::string& buf, T v) {
  char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  buf.append(b, sizeof(T));
}

void write_pcm16_stereo(const fs::path& p, const std::vector<std::int16_t>& left,
                        const std::vector<std::int16_t>& right, std::uint32_t rate) {
  std::string data;
  for (std::size_t k = 0; k < left.size(); ++k) {
    put(data, left[k]);
    put(data, right[k]);
  }
  std::string buf = "RIFF";
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(36 + data.size()));
  buf += "WAVEfmt ";
  put<std::uint32_t>(buf, 16);
  put<std::uint16_t>(buf, 1);
  put<std::uint16_t>(buf, 2);
  put<std::uint32_t>(buf, rate);
  put<std::uint32_t>(buf, rate * 4);
  put<std::uint16_t>(buf, 4);
  put<std::uint16_t>(buf, 16);
  buf += "data";
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(data.size()));
  buf += data;
  std::ofstream(p, std::ios::binary) << buf;
}

}  // namespace

TEST_CASE("float WAV round trip keeps samples to float precision") {
  const auto dir = testutil::scratch_dir("wav");
  SimConfig c;
  c.duration = 0.5;
  const auto m = generate_mixture(c);
  write_wav_float(dir / "y.wav", m.y, m.fs);
  const auto s = read_wav(dir / "y.wav");
  CHECK(s.fs == 25000.0);
  CHECK(s.channels == 1);
  REQUIRE(s.samples.size() == m.y.size());
  for (std::size_t k = 0; k < s.samples.size(); ++k) {
    REQUIRE(s.samples[k] == static_cast<double>(static_cast<float>(m.y[k])));
  }
  CHECK(load_signal(dir / "y.wav").samples == s.samples);
}

TEST_CASE("stereo 16-bit WAV yields the first channel and a warning") {
  const auto dir = testutil::scratch_dir("stereo");
  write_pcm16_stereo(dir / "st.wav", {0, 16384, -32768}, {1, 2, 3}, 50000);
  const auto s = read_wav(dir / "st.wav");
  CHECK(s.fs == 50000.0);
  CHECK(s.channels == 2);
  CHECK(s.samples == std::vector<double>{0.0, 0.5, -1.0});
  CHECK_FALSE(s.warnings.empty());
}

TEST_CASE("CSV signals need a sample rate") {
  const auto dir = testutil::scratch_dir("csvsig");
  std::ofstream(dir / "x.csv") << "value\n0.5\n-1.25\n3\n";
  CHECK_THROWS_AS(load_signal(dir / "x.csv"), ConfigError);
  const auto s = load_signal(dir / "x.csv", 1000.0);
  CHECK(s.samples == std::vector<double>{0.5, -1.25, 3.0});
  CHECK(s.fs == 1000.0);
  std::ofstream(dir / "bad.csv") << "1\nabc\n";
  CHECK_THROWS_AS(load_signal(dir / "bad.csv", 1000.0), DataError);
  CHECK_THROWS_AS(load_signal(dir / "missing.wav"), DataError);
  std::ofstream(dir / "junk.wav") << "RIFF1234WAVEjunk";
  CHECK_THROWS_AS(load_signal(dir / "junk.wav"), DataError);
}

TEST_CASE("NMF pipeline on a clean SOI finds the fault frequency") {
  PipelineConfig c = small_config();
  c.sim.noise_sigma = 0.0;
  c.sim.dist_count = 0;
  const auto sig = load_pipeline_signal(c);
  FitOptions o = c.fit;
  const auto r = run_nmf_pipeline(sig, c, o);
  CHECK(r.stages == std::vector<std::string>{"excerpt", "spectrogram", "nmf", "select_component",
                                             "time_profile_spectrum", "sbi"});
  const auto& sp = r.report.profile_spectrum;
  CHECK(std::abs(static_cast<double>(peak_bin(sp)) * sp.bin_hz - 30.0) <= sp.bin_hz);
  CHECK(r.factors.H.rows() == 889);
  CHECK_FALSE(r.factors.V.has_value());
}

TEST_CASE("NMF pipeline on pure noise has a small SBI") {
  PipelineConfig c = small_config();
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    CounterRng rng(derive_seed(seed, "pure-noise"));
    std::vector<double> x(25000);
    for (auto& v : x) v = rng.normal();
    FitOptions o = c.fit;
    o.seed = seed;
    worst = std::max(worst, run_nmf_pipeline(x, c, o).report.sbi);
  }
  CHECK(worst < 0.05);
}

TEST_CASE("NTF pipeline stage order, single fold and determinism") {
  PipelineConfig c = small_config();
  const auto sig = load_pipeline_signal(c);
  FitOptions o = c.fit;
  o.beta = beta::kl;
  const auto r = run_ntf_pipeline(sig, c, o);
  CHECK(r.stages == std::vector<std::string>{"tensorize", "ntf", "select_component",
                                             "time_profile_spectrum", "sbi"});
  CHECK(r.factors.V->rows() == 3);
  CHECK(r.frame_rate == doctest::Approx(25000.0 / 28.0));

  PipelineConfig one = c;
  one.fold_count = 1;
  const auto r1 = run_ntf_pipeline(sig, one, o);
  CHECK(r1.factors.W.rows() == 257);
  CHECK(r1.factors.H.rows() == 889);
  CHECK(r1.factors.V->rows() == 1);

  const auto d1 = testutil::scratch_dir("det1"), d2 = testutil::scratch_dir("det2");
  write_pipeline_outputs(r, d1);
  write_pipeline_outputs(run_ntf_pipeline(sig, c, o), d2);
  for (const char* f : {"report.json", "W.csv", "H.csv", "V.csv", "history.json", "spectrum.csv"}) {
    CHECK(slurp(d1 / f) == slurp(d2 / f));
  }
  // exported factors re-ingest losslessly
  CHECK(read_matrix_csv(d1 / "W.csv") == r.factors.W);
  CHECK(read_matrix_csv(d1 / "V.csv") == *r.factors.V);
  DiagnosticReport back;
  from_json(read_json(d1 / "report.json"), back);
  CHECK(back.sbi == r.report.sbi);
  CHECK(back.time_profile == r.report.time_profile);
}

TEST_CASE("sweep produces 2 methods x 3 betas records per replicate") {
  PipelineConfig c = small_config();
  c.sigmas = {0.5, 1.5};
  c.fit.max_iters = 20;
  const auto rep = run_sweep(c);
  CHECK(rep.records.size() == 2 * 1 * 2 * 3);
  CHECK(rep.maps.size() == 6);
  for (const auto& [key, m] : rep.maps) {
    CHECK(m.frequency.values.cols() == 2);
    CHECK(m.frequency.values.rows() == 257);
    CHECK(m.time.values.rows() == 889);
    CHECK(m.frequency.snr_db[0] > m.frequency.snr_db[1]);
  }
  for (const auto& r : rep.records) {
    CHECK(r.error.empty());
    CHECK(r.sbi >= 0.0);
  }
  REQUIRE(rep.sbi_table.size() == 2);
  CHECK(rep.sbi_table[0].sigma == 0.5);
  CHECK(rep.sbi_table[0].median_sbi.size() == 6);

  PipelineConfig par = c;
  par.workers = 2;
  const auto rep2 = run_sweep(par);
  for (std::size_t k = 0; k < rep.records.size(); ++k) {
    CHECK(rep2.records[k].sbi == rep.records[k].sbi);
    CHECK(rep2.records[k].snr_db == rep.records[k].snr_db);
  }

  const auto dir = testutil::scratch_dir("sweep");
  write_sweep_outputs(rep, dir);
  CHECK(fs::exists(dir / "freqmap_ntf_eu.csv"));
  CHECK(fs::exists(dir / "sbi_vs_snr.csv"));
  const auto j = read_json(dir / "sweep.json");
  CHECK(j.at("records").size() == rep.records.size());
}

TEST_CASE("sweep keeps going when a case fails") {
  PipelineConfig c = small_config();
  c.fold_len_s = 0.001;  // shorter than one STFT window
  c.fold_count = 1;
  c.fit.max_iters = 5;
  const auto rep = run_sweep(c);
  REQUIRE(rep.records.size() == 6);
  for (const auto& r : rep.records) CHECK_FALSE(r.error.empty());
}

TEST_CASE("pipeline config JSON round trip and validation") {
  PipelineConfig c = small_config();
  c.betas = {beta::is};
  c.fit.rank = 3;
  c.stft.window = WindowKind::hann;
  c.tensorize_mode = TensorizeMode::global_slice;
  const json j = c;
  PipelineConfig back;
  from_json(j, back);
  CHECK(back.betas == c.betas);
  CHECK(back.fit.rank == 3);
  CHECK(back.stft.window == WindowKind::hann);
  CHECK(back.tensorize_mode == TensorizeMode::global_slice);
  CHECK(back.sim.duration == 3.0);
  CHECK(back.sigmas == c.sigmas);

  PipelineConfig partial;
  from_json(json::parse(R"({"fit": {"beta": "kl"}, "fold_count": 10})"), partial);
  CHECK(partial.fit.beta == 0.0);
  CHECK(partial.fold_count == 10);
  CHECK(partial.fit.rank == 2);

  PipelineConfig bad = small_config();
  bad.fold_count = 10;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = small_config();
  bad.source = SignalSource::file;
  bad.input_path = "/nonexistent/file.wav";
  CHECK_THROWS_AS(bad.validate(), DataError);
  CHECK_THROWS_AS(method_from_string("pca"), ConfigError);

  const auto real = real_signal_defaults("rig.wav");
  CHECK(real.stft.fs == 50000.0);
  CHECK(real.fold_count == 40);
}

TEST_CASE("median") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK(std::isnan(median({})));
}
