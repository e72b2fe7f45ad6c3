// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "helpers.hpp"

#include "bearingntf/diagnostics.hpp"
#include "bearingntf/error.hpp"

using namespace bearingntf;

namespace {

constexpr double kFrameRate = 25000.0 / 28.0;

Spectrum harmonic_spectrum(double bin_hz, std::size_t bins, double fault, std::size_t m1) {
  Spectrum s;
  s.bin_hz = bin_hz;
  s.magnitude.assign(bins, 0.0);
  for (std::size_t i = 1; i <= m1; ++i) {
    s.magnitude[static_cast<std::size_t>(std::lround(i * fault / bin_hz))] = 1.0;
  }
  return s;
}

}  // namespace

TEST_CASE("skewness") {
  CHECK(skewness(std::vector<double>(10, 3.0)) == 0.0);
  std::vector<double> sym;
  for (int k = 0; k < 5; ++k) sym.insert(sym.end(), {-1.0, 0.0, 1.0});
  CHECK(skewness(sym) == doctest::Approx(0.0));

  // {0,0,0,0,10}: mean 2, m2 = (4*4 + 64)/5 = 16, m3 = (4*(-8) + 512)/5 = 96
  const std::vector<double> spike{0, 0, 0, 0, 10};
  CHECK(skewness(spike) == doctest::Approx(96.0 / std::pow(16.0, 1.5)));
  CHECK(skewness(spike) > 0.0);
  CHECK_THROWS_AS(skewness(std::vector<double>{1.0, 2.0}), DataError);
}

TEST_CASE("select_component") {
  CounterRng rng(1);
  CHECK(select_component(Matrix(20, 1, 0.5)) == 0);

  Matrix h(300, 2);
  for (std::size_t k = 0; k < 300; ++k) {
    h(k, 0) = 1.0 + 0.1 * rng.uniform();
    h(k, 1) = (k % 30 == 0) ? 5.0 : 0.01 * rng.uniform();
  }
  const auto sk = column_skewness(h);
  CHECK(sk[1] > sk[0]);
  CHECK(select_component(h) == 1);

  Matrix twin(50, 2);
  for (std::size_t k = 0; k < 50; ++k) twin(k, 0) = twin(k, 1) = rng.uniform();
  CHECK(select_component(twin) == 0);
}

TEST_CASE("property: selection ignores positive column rescaling") {
  CounterRng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix h(64, 3);
    for (auto& x : h.data()) x = std::pow(rng.uniform_open0(), 1.0 + 4.0 * rng.uniform());
    const auto ref = select_component(h);
    for (std::size_t j = 0; j < 3; ++j) {
      const double c = 0.01 + 100.0 * rng.uniform();
      for (auto& x : h.col(j)) x *= c;
    }
    CHECK(select_component(h) == ref);
  }
}

TEST_CASE("profile spectrum of a 30 Hz cosine peaks at the nearest bin") {
  const std::size_t n = 889;
  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = 2.0 + std::cos(2.0 * std::numbers::pi * 30.0 * k / kFrameRate);
  const auto s = time_profile_spectrum(x, kFrameRate);
  CHECK(s.bin_hz == doctest::Approx(kFrameRate / n));
  CHECK(s.magnitude.size() == n / 2 + 1);
  CHECK(s.magnitude[0] == 0.0);
  CHECK(peak_bin(s) == static_cast<std::size_t>(std::lround(30.0 / s.bin_hz)));
  CHECK(s.magnitude[peak_bin(s)] == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("constant profile gives a zero spectrum") {
  const auto s = time_profile_spectrum(std::vector<double>(100, 7.0), kFrameRate);
  for (double m : s.magnitude) CHECK(m == doctest::Approx(0.0));
}

TEST_CASE("impulse comb profile has peaks at the fault harmonics") {
  // period of exactly 30 frames at a frame rate of 900 Hz -> 30 Hz comb
  const double rate = 900.0;
  std::vector<double> x(900, 0.0);
  for (std::size_t k = 0; k < x.size(); k += 30) x[k] = 1.0;
  const auto s = time_profile_spectrum(x, rate);
  CHECK(s.bin_hz == doctest::Approx(1.0));
  for (std::size_t k = 1; k < s.magnitude.size(); ++k) {
    if (k % 30 == 0) CHECK(s.magnitude[k] > 0.03);  // Nyquist bin is not doubled
    else CHECK(s.magnitude[k] < 1e-12);
  }
  CHECK(sbi(s, 30.0, 6) > 0.0);
}

TEST_CASE("SBI of unit harmonics is one") {
  const auto s = harmonic_spectrum(1.0, 200, 30.0, 6);
  const auto r = sbi_detail(s, 30.0, 6);
  CHECK(std::abs(r.value - 1.0) <= 1e-12);
  REQUIRE(r.harmonics.size() == 6);
  for (double a : r.harmonics) CHECK(a == 1.0);
}

TEST_CASE("SBI picks the largest bin within one bin of the harmonic") {
  Spectrum s;
  s.bin_hz = 1.0;
  s.magnitude.assign(200, 0.0);
  s.magnitude[31] = 2.0;  // off by one from 30
  s.magnitude[28] = 9.0;  // outside the window
  const auto r = sbi_detail(s, 30.0, 1);
  CHECK(r.harmonics[0] == 2.0);
  CHECK(r.value == doctest::Approx(4.0 / 11.0));
}

TEST_CASE("SBI of flat and zero spectra") {
  Spectrum flat;
  flat.bin_hz = kFrameRate / 889.0;
  flat.magnitude.assign(445, 1e-3);
  CHECK(sbi(flat, 30.0) < 0.05);
  Spectrum zero = flat;
  zero.magnitude.assign(445, 0.0);
  CHECK(sbi(zero, 30.0) == 0.0);
}

TEST_CASE("SBI scales linearly with the spectrum") {
  CounterRng rng(4);
  Spectrum s;
  s.bin_hz = 1.0;
  s.magnitude.resize(300);
  for (auto& m : s.magnitude) m = rng.uniform();
  const double base = sbi(s, 30.0);
  for (double c : {0.5, 3.0, 40.0}) {
    Spectrum t = s;
    for (auto& m : t.magnitude) m *= c;
    CHECK(sbi(t, 30.0) == doctest::Approx(c * base).epsilon(1e-12));
  }
}

TEST_CASE("SBI harmonic above Nyquist is a config error") {
  const auto s = harmonic_spectrum(1.0, 100, 30.0, 3);  // Nyquist 99 Hz
  CHECK_THROWS_AS(sbi(s, 30.0, 6), ConfigError);
}

TEST_CASE("diagnose wires selection, spectrum and SBI together") {
  Matrix h(889, 2), w(257, 2, 0.1);
  CounterRng rng(5);
  for (std::size_t k = 0; k < 889; ++k) {
    h(k, 0) = 1.0 + 0.05 * rng.uniform();
    h(k, 1) = 0.0;
  }
  for (double t = 0.0; t < 889; t += kFrameRate / 30.0) h(static_cast<std::size_t>(t), 1) = 1.0;
  w(51, 1) = 1.0;
  const auto r = diagnose(w, h, kFrameRate, 30.0, 6);
  CHECK(r.selected_component == 1);
  CHECK(r.skewness.size() == 2);
  CHECK(r.frequency_profile == w.col_copy(1));
  CHECK(r.time_profile == h.col_copy(1));
  CHECK(r.sbi == doctest::Approx(sbi(r.profile_spectrum, 30.0, 6)));
  CHECK(std::abs(r.profile_spectrum.freq_axis()[peak_bin(r.profile_spectrum)] - 30.0) <=
        r.profile_spectrum.bin_hz);
  CHECK_THROWS_AS(diagnose(Matrix(5, 3), h, kFrameRate, 30.0), ShapeError);
}

TEST_CASE("noise maps") {
  std::vector<NoiseMapCase> cases;
  cases.push_back({1.0, -10.0, {0.0, 2.0, 4.0}, {1.0, 0.5}});
  cases.push_back({0.5, -5.0, {3.0, 1.0, 0.0}, {0.0, 0.0}});
  cases.push_back({2.0, -15.0, {1.0, 1.0, 1.0}, {2.0, 8.0}});
  const std::vector<double> fax{0.0, 10.0, 20.0};
  const auto maps = build_noise_maps(cases, fax);
  REQUIRE(maps.frequency.values.cols() == 3);
  CHECK(maps.frequency.snr_db == std::vector<double>{-5.0, -10.0, -15.0});
  CHECK(maps.frequency.sigma == std::vector<double>{0.5, 1.0, 2.0});
  CHECK(maps.frequency.values.col_copy(0) == std::vector<double>{1.0, 1.0 / 3.0, 0.0});
  CHECK(maps.frequency.values.col_copy(1) == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(maps.frequency.axis == fax);
  // all-zero time profile stays zero
  CHECK(maps.time.values.col_copy(0) == std::vector<double>{0.0, 0.0});
  CHECK(maps.time.values.col_copy(2) == std::vector<double>{0.25, 1.0});
  CHECK(maps.time.axis == std::vector<double>{0.0, 1.0});
  CHECK(maps.frequency.labels().size() == 3);

  const auto single = build_noise_maps({cases[0]});
  CHECK(single.frequency.values.cols() == 1);
  CHECK(*std::max_element(single.frequency.values.data().begin(), single.frequency.values.data().end()) == 1.0);

  cases.push_back({3.0, -20.0, {1.0, 2.0}, {1.0, 1.0}});
  CHECK_THROWS_AS(build_noise_maps(cases), ShapeError);
  CHECK_THROWS_AS(build_noise_maps({}), DataError);
}
