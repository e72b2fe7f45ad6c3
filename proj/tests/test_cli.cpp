// SPDX-License-Identifier: Apache-2.0
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <string>

#include "doctest.h"
#include "helpers.hpp"

#include "bearingntf/json_io.hpp"
#include "bearingntf/tensor_io.hpp"

#ifndef BEARINGNTF_CLI
#error "BEARINGNTF_CLI must name the command-line binary"
#endif

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(BEARINGNTF_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("cli end to end with exit codes") {
  const auto dir = testutil::scratch_dir("cli");
  const std::string d = dir.string();

  CHECK(run("") == 1);
  CHECK(run("--no-such-flag simulate") == 1);
  CHECK(run("frobnicate") == 1);

  REQUIRE(run("--out " + d + "/sim --seed 3 simulate --duration 2 --dist-count 1") == 0);
  for (const char* f : {"y.wav", "s.wav", "d.wav", "n.wav", "simulate.json"}) {
    CHECK(fs::exists(dir / "sim" / f));
  }
  const auto side = bearingntf::read_json(dir / "sim" / "simulate.json");
  CHECK(side.at("config").at("rng_seed") == 3);
  CHECK(side.contains("snr_db"));

  REQUIRE(run("--out " + d + "/spec spectrogram " + d + "/sim/y.wav --folds 2") == 0);
  const auto t = bearingntf::read_tensor(dir / "spec" / "tensor.bntf");
  CHECK(t.dims() == bearingntf::Dims3{257, 889, 2});

  REQUIRE(run("--out " + d + "/spec2 spectrogram " + d + "/sim/y.wav --overlap 64 --nfft 256") == 0);
  CHECK(bearingntf::read_matrix_csv(dir / "spec2" / "spectrogram.csv").rows() == 129);

  REQUIRE(run("--out " + d + "/fac factorize " + d + "/spec/tensor.bntf --beta is --max-iters 10") == 0);
  CHECK(fs::exists(dir / "fac" / "V.csv"));
  const auto hist = bearingntf::read_json(dir / "fac" / "history.json");
  CHECK(hist.at("iterations").get<int>() <= 10);

  REQUIRE(run("--out " + d + "/fac2 factorize " + d + "/sim/y.wav --method nmf --max-iters 10") == 0);
  CHECK(fs::exists(dir / "fac2" / "report.json"));

  REQUIRE(run("--out " + d + "/dia diagnose --w-csv " + d + "/fac/W.csv --h-csv " + d +
              "/fac/H.csv --frame-rate 892.857142857") == 0);
  const auto rep = bearingntf::read_json(dir / "dia" / "report.json");
  CHECK(rep.at("sbi").get<double>() >= 0.0);
  CHECK(fs::exists(dir / "dia" / "spectrum.csv"));

  // config file layered under the flags
  std::ofstream(dir / "cfg.json") << R"({"sim": {"duration": 2.0, "dist_count": 1}, "fold_count": 2,
                                       "fit": {"max_iters": 5}})";
  REQUIRE(run("--config " + d + "/cfg.json --out " + d + "/sweep sweep --sigmas 0.5 --betas eu") == 0);
  const auto sw = bearingntf::read_json(dir / "sweep" / "sweep.json");
  CHECK(sw.at("records").size() == 2);

  // data errors
  CHECK(run("--out " + d + "/x factorize " + d + "/missing.bntf") == 2);
  std::ofstream(dir / "neg.csv") << "0,1\n1,-2\n3,4\n";
  CHECK(run("--out " + d + "/x factorize " + d + "/neg.csv --method nmf") == 2);
  std::ofstream(dir / "sig.csv") << "1\n2\n";
  CHECK(run("--out " + d + "/x spectrogram " + d + "/sig.csv") == 1);  // needs --fs
  CHECK(run("--out " + d + "/x factorize " + d + "/spec/tensor.bntf --beta nope") == 1);
  // a harmonic above the profile Nyquist is a configuration error
  CHECK(run("--out " + d + "/x diagnose --w-csv " + d + "/fac/W.csv --h-csv " + d +
            "/fac/H.csv --frame-rate 100") == 1);
}
