// SPDX-License-Identifier: Apache-2.0
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "bearingntf/diagnostics.hpp"
#include "bearingntf/error.hpp"
#include "bearingntf/factorization.hpp"
#include "bearingntf/signal_sim.hpp"
#include "bearingntf/spectrogram.hpp"
#include "bearingntf/tensor.hpp"
#include "bearingntf/tensor_io.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace bearingntf;

namespace {

// Both Matrix and Tensor3 are column-major, so Fortran-ordered arrays map
// onto them without reordering.
using farray = py::array_t<double, py::array::f_style | py::array::forcecast>;

Matrix to_matrix(const farray& a) {
  if (a.ndim() != 2) throw ShapeError("expected a 2-D array");
  const auto r = static_cast<std::size_t>(a.shape(0)), c = static_cast<std::size_t>(a.shape(1));
  return Matrix(r, c, std::vector<double>(a.data(), a.data() + r * c));
}

Tensor3 to_tensor(const farray& a) {
  if (a.ndim() != 3) throw ShapeError("expected a 3-D array");
  const Dims3 d{static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)),
                static_cast<std::size_t>(a.shape(2))};
  return Tensor3(d, std::vector<double>(a.data(), a.data() + d.numel()));
}

farray from_matrix(const Matrix& m) {
  farray out({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

farray from_tensor(const Tensor3& t) {
  farray out({t.dims().I, t.dims().P, t.dims().L});
  std::copy(t.data().begin(), t.data().end(), out.mutable_data());
  return out;
}

py::array_t<double> from_vector(const std::vector<double>& v) {
  py::array_t<double> out(v.size());
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

std::vector<double> to_vector(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 1) throw ShapeError("expected a 1-D array");
  return {a.data(), a.data() + a.size()};
}

StftParams stft_params(double fs, std::size_t window_len, std::size_t overlap, std::size_t nfft,
                       const std::string& window) {
  StftParams p;
  p.fs = fs;
  p.window_len = window_len;
  p.overlap = overlap;
  p.nfft = nfft;
  p.window = window_from_string(window);
  return p;
}

FitOptions fit_options(std::size_t rank, const py::object& beta, std::size_t max_iters, double tol,
                       std::uint64_t seed, bool freeze) {
  FitOptions o;
  o.rank = rank;
  o.beta = py::isinstance<py::str>(beta) ? beta_from_string(beta.cast<std::string>()) : beta.cast<double>();
  o.max_iters = max_iters;
  o.tol = tol;
  o.seed = seed;
  o.freeze_fold_weights = freeze;
  return o;
}

py::dict factors_dict(const FactorSet& f) {
  py::dict d;
  d["W"] = from_matrix(f.W);
  d["H"] = from_matrix(f.H);
  d["V"] = f.V ? py::object(from_matrix(*f.V)) : py::object(py::none());
  d["objective"] = from_vector(f.history.objective);
  d["residual"] = from_vector(f.history.residual);
  d["iterations"] = f.iterations;
  d["converged"] = f.converged;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectrogram factorization for impulsive fault detection";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  // tensor algebra
  m.def("unfold", [](const farray& t, int mode) { return from_matrix(unfold(to_tensor(t), mode_from_int(mode))); },
        "tensor"_a, "mode"_a);
  m.def("fold",
        [](const farray& a, int mode, std::array<std::size_t, 3> dims) {
          return from_tensor(fold(to_matrix(a), mode_from_int(mode), {dims[0], dims[1], dims[2]}));
        },
        "matrix"_a, "mode"_a, "dims"_a);
  m.def("mode_n_product",
        [](const farray& t, const farray& u, int mode) {
          return from_tensor(mode_n_product(to_tensor(t), to_matrix(u), mode_from_int(mode)));
        },
        "tensor"_a, "matrix"_a, "mode"_a);
  m.def("khatri_rao", [](const farray& a, const farray& b) { return from_matrix(khatri_rao(to_matrix(a), to_matrix(b))); },
        "a"_a, "b"_a);
  m.def("cp_reconstruct",
        [](const farray& w, const farray& h, const farray& v) {
          return from_tensor(cp_reconstruct(to_matrix(w), to_matrix(h), to_matrix(v)));
        },
        "w"_a, "h"_a, "v"_a);
  m.def("write_tensor", [](const std::string& path, const farray& t) { write_tensor(std::filesystem::path(path), to_tensor(t)); },
        "path"_a, "tensor"_a);
  m.def("read_tensor", [](const std::string& path) { return from_tensor(read_tensor(std::filesystem::path(path))); },
        "path"_a);

  // simulation
  m.def("simulate",
        [](double noise_sigma, double duration, double fs, int dist_count, double soi_damping,
           double dist_damping, std::uint64_t seed) {
          SimConfig c;
          c.noise_sigma = noise_sigma;
          c.duration = duration;
          c.fs = fs;
          c.dist_count = dist_count;
          c.soi_damping = soi_damping;
          c.dist_damping = dist_damping;
          c.rng_seed = seed;
          const auto mix = generate_mixture(c);
          py::dict d;
          d["y"] = from_vector(mix.y);
          d["s"] = from_vector(mix.s);
          d["d"] = from_vector(mix.d);
          d["n"] = from_vector(mix.n);
          d["fs"] = mix.fs;
          // undefined without disturbance or noise
          try {
            d["snr_db"] = measure_snr(mix);
          } catch (const NumericalError&) {
            d["snr_db"] = py::none();
          }
          return d;
        },
        "noise_sigma"_a = 0.5, "duration"_a = 60.0, "fs"_a = 25000.0, "dist_count"_a = 30,
        "soi_damping"_a = SimConfig{}.soi_damping, "dist_damping"_a = SimConfig{}.dist_damping,
        "seed"_a = 0);
  m.def("measure_snr",
        [](const py::array_t<double>& s, const py::array_t<double>& n) {
          return measure_snr(to_vector(s), to_vector(n));
        },
        "signal"_a, "noise"_a);
  m.def("sigma_grid", &sigma_grid, "lo"_a = 0.5, "hi"_a = 3.0, "step"_a = 0.1);

  // spectrogram
  m.def("spectrogram",
        [](const py::array_t<double>& x, double fs, std::size_t window_len, std::size_t overlap,
           std::size_t nfft, const std::string& window) {
          const auto sg = stft_spectrogram(to_vector(x), stft_params(fs, window_len, overlap, nfft, window));
          return py::make_tuple(from_matrix(sg.values), from_vector(sg.freq_axis), from_vector(sg.time_axis));
        },
        "signal"_a, "fs"_a, "window_len"_a = 128, "overlap"_a = 100, "nfft"_a = 512, "window"_a = "hamming");
  m.def("tensorize",
        [](const py::array_t<double>& x, double fs, double fold_seconds, std::size_t folds,
           std::size_t window_len, std::size_t overlap, std::size_t nfft, const std::string& window) {
          return from_tensor(tensorize(to_vector(x), stft_params(fs, window_len, overlap, nfft, window),
                                       fold_seconds, folds));
        },
        "signal"_a, "fs"_a, "fold_seconds"_a = 1.0, "folds"_a = 40, "window_len"_a = 128,
        "overlap"_a = 100, "nfft"_a = 512, "window"_a = "hamming");

  // factorization
  m.def("beta_divergence",
        [](const py::array_t<double>& y, const py::array_t<double>& q, double beta) {
          py::array_t<double, py::array::c_style | py::array::forcecast> yc(y), qc(q);
          if (yc.size() != qc.size()) throw ShapeError("beta_divergence: shape mismatch");
          return beta_divergence(std::span<const double>(yc.data(), yc.size()),
                                 std::span<const double>(qc.data(), qc.size()), beta);
        },
        "y"_a, "q"_a, "beta"_a);
  m.def("nmf",
        [](const farray& y, std::size_t rank, const py::object& beta, std::size_t max_iters, double tol,
           std::uint64_t seed) {
          const auto mat = to_matrix(y);
          const auto o = fit_options(rank, beta, max_iters, tol, seed, false);
          py::gil_scoped_release release;
          auto f = nmf(mat, o);
          py::gil_scoped_acquire acquire;
          return factors_dict(f);
        },
        "y"_a, "rank"_a = 2, "beta"_a = py::str("eu"), "max_iters"_a = 100, "tol"_a = 1e-5, "seed"_a = 0);
  m.def("ntf",
        [](const farray& y, std::size_t rank, const py::object& beta, std::size_t max_iters, double tol,
           std::uint64_t seed, bool freeze_fold_weights) {
          const auto t = to_tensor(y);
          const auto o = fit_options(rank, beta, max_iters, tol, seed, freeze_fold_weights);
          py::gil_scoped_release release;
          auto f = ntf(t, o);
          py::gil_scoped_acquire acquire;
          return factors_dict(f);
        },
        "y"_a, "rank"_a = 2, "beta"_a = py::str("eu"), "max_iters"_a = 100, "tol"_a = 1e-5, "seed"_a = 0,
        "freeze_fold_weights"_a = false);

  // diagnostics
  m.def("skewness", [](const py::array_t<double>& x) { return skewness(to_vector(x)); }, "x"_a);
  m.def("select_component", [](const farray& h) { return select_component(to_matrix(h)); }, "h"_a);
  m.def("profile_spectrum",
        [](const py::array_t<double>& h, double frame_rate) {
          const auto s = time_profile_spectrum(to_vector(h), frame_rate);
          return py::make_tuple(from_vector(s.freq_axis()), from_vector(s.magnitude));
        },
        "profile"_a, "frame_rate"_a);
  m.def("sbi",
        [](const py::array_t<double>& magnitude, double bin_hz, double fault_freq, std::size_t m1) {
          Spectrum s;
          s.magnitude = to_vector(magnitude);
          s.bin_hz = bin_hz;
          return bearingntf::sbi(s, fault_freq, m1);
        },
        "magnitude"_a, "bin_hz"_a, "fault_freq"_a = 30.0, "m1"_a = 6);
  m.def("diagnose",
        [](const farray& w, const farray& h, double frame_rate, double fault_freq, std::size_t m1) {
          const auto r = diagnose(to_matrix(w), to_matrix(h), frame_rate, fault_freq, m1);
          py::dict d;
          d["selected_component"] = r.selected_component;
          d["skewness"] = r.skewness;
          d["sbi"] = r.sbi;
          d["harmonics"] = r.harmonics;
          d["spectrum_freq"] = from_vector(r.profile_spectrum.freq_axis());
          d["spectrum"] = from_vector(r.profile_spectrum.magnitude);
          d["frequency_profile"] = from_vector(r.frequency_profile);
          d["time_profile"] = from_vector(r.time_profile);
          return d;
        },
        "w"_a, "h"_a, "frame_rate"_a, "fault_freq"_a = 30.0, "m1"_a = 6);
}
