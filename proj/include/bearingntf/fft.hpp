// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace bearingntf {

// Real-to-complex forward DFT of fixed length n, backed by FFTW.
// Output bin k (0 <= k <= n/2) is sum_t x[t] exp(-2*pi*i*k*t/n).
// Instances are cheap to use repeatedly; a single instance must not be shared
// between threads, distinct instances may run concurrently.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(RealFft&&) noexcept;
  RealFft& operator=(RealFft&&) noexcept;
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const noexcept { return n_; }
  std::size_t bins() const noexcept { return n_ / 2 + 1; }

  // `in` may be shorter than n; it is zero-padded. Returns a view of the
  // internal output buffer, valid until the next call.
  std::span<const std::complex<double>> forward(std::span<const double> in);

 private:
  struct Impl;
  std::size_t n_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace bearingntf
