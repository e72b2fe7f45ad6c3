// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "bearingntf/random.hpp"
#include "bearingntf/tensor.hpp"

namespace testutil {

using namespace bearingntf;

inline Matrix random_matrix(std::size_t r, std::size_t c, CounterRng& rng, double lo = 0.0,
                            double hi = 1.0) {
  Matrix m(r, c);
  for (auto& x : m.data()) x = lo + (hi - lo) * rng.uniform_open0();
  return m;
}

inline Tensor3 random_tensor(Dims3 d, CounterRng& rng, double lo = 0.0, double hi = 1.0) {
  Tensor3 t(d);
  for (auto& x : t.data()) x = lo + (hi - lo) * rng.uniform_open0();
  return t;
}

// Direct triple loop, independent of the library's reconstruction.
inline double cp_entry(const Matrix& w, const Matrix& h, const Matrix& v, std::size_t i,
                       std::size_t p, std::size_t l) {
  double s = 0.0;
  for (std::size_t j = 0; j < w.cols(); ++j) s += w(i, j) * h(p, j) * v(l, j);
  return s;
}

inline double rel_error(std::span<const double> a, std::span<const double> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    num += (a[k] - b[k]) * (a[k] - b[k]);
    den += b[k] * b[k];
  }
  return std::sqrt(num / den);
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("bearingntf_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testutil
