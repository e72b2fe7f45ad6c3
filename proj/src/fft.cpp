// SPDX-License-Identifier: Apache-2.0
#include "bearingntf/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

#include "bearingntf/error.hpp"

namespace bearingntf {

namespace {

// The FFTW planner keeps global state.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct RealFft::Impl {
  double* in = nullptr;
  fftw_complex* out = nullptr;
  fftw_plan plan = nullptr;

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (plan) fftw_destroy_plan(plan);
    fftw_free(in);
    fftw_free(out);
  }
};

RealFft::RealFft(std::size_t n) : n_(n), impl_(std::make_unique<Impl>()) {
  if (n == 0) throw ConfigError("RealFft: length must be positive");
  std::lock_guard lock(planner_mutex());
  impl_->in = fftw_alloc_real(n);
  impl_->out = fftw_alloc_complex(n / 2 + 1);
  // FFTW_ESTIMATE keeps planning deterministic (no timing-dependent choice),
  // which keeps results bit-identical run to run.
  impl_->plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), impl_->in, impl_->out, FFTW_ESTIMATE);
  if (!impl_->plan) throw NumericalError("RealFft: FFTW planning failed");
}

RealFft::~RealFft() = default;
RealFft::RealFft(RealFft&&) noexcept = default;
RealFft& RealFft::operator=(RealFft&&) noexcept = default;

std::span<const std::complex<double>> RealFft::forward(std::span<const double> in) {
  if (in.size() > n_) throw ShapeError("RealFft: input longer than transform length");
  std::copy(in.begin(), in.end(), impl_->in);
  std::fill(impl_->in + in.size(), impl_->in + n_, 0.0);
  fftw_execute(impl_->plan);
  return {reinterpret_cast<const std::complex<double>*>(impl_->out), bins()};
}

}  // namespace bearingntf
