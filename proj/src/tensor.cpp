// SPDX-License-Identifier: Apache-2.0
#include "bearingntf/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bearingntf/error.hpp"

namespace bearingntf {

namespace {

std::string shape_str(std::size_t r, std::size_t c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

std::size_t checked_cols(const Matrix& a, const Matrix& b, const char* what) {
  if (a.cols() != b.cols()) {
    throw ShapeError(std::string(what) + ": column count mismatch " +
                     std::to_string(a.cols()) + " vs " + std::to_string(b.cols()));
  }
  return a.cols();
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw ShapeError("Matrix: " + std::to_string(data_.size()) +
                     " values do not fill a " + shape_str(rows_, cols_) + " matrix");
  }
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.front().size();
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    if (rows[i].size() != c) throw ShapeError("Matrix::from_rows: ragged rows");
    for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::vector<double> Matrix::col_copy(std::size_t c) const {
  auto s = col(c);
  return {s.begin(), s.end()};
}

bool Matrix::is_nonnegative() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return x >= 0.0; });
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

std::size_t Dims3::extent(int mode) const {
  switch (mode) {
    case 1: return I;
    case 2: return P;
    case 3: return L;
    default: throw ConfigError("tensor mode must be 1, 2 or 3, got " + std::to_string(mode));
  }
}

Mode mode_from_int(int mode) {
  if (mode < 1 || mode > 3) {
    throw ConfigError("tensor mode must be 1, 2 or 3, got " + std::to_string(mode));
  }
  return static_cast<Mode>(mode);
}

Tensor3::Tensor3(Dims3 dims, double fill) : dims_(dims), data_(dims.numel(), fill) {
  if (dims.I == 0 || dims.P == 0 || dims.L == 0) {
    throw ShapeError("Tensor3: all dimensions must be positive");
  }
}

Tensor3::Tensor3(Dims3 dims, std::vector<double> data) : dims_(dims), data_(std::move(data)) {
  if (dims.I == 0 || dims.P == 0 || dims.L == 0) {
    throw ShapeError("Tensor3: all dimensions must be positive");
  }
  if (data_.size() != dims.numel()) {
    throw ShapeError("Tensor3: data length " + std::to_string(data_.size()) +
                     " does not match dims product " + std::to_string(dims.numel()));
  }
}

Tensor3 Tensor3::iota(Dims3 dims, double start) {
  Tensor3 t(dims);
  for (std::size_t k = 0; k < t.size(); ++k) t.data_[k] = start + static_cast<double>(k);
  return t;
}

Matrix Tensor3::slice(std::size_t l) const {
  auto s = slice_span(l);
  return Matrix(dims_.I, dims_.P, std::vector<double>(s.begin(), s.end()));
}

void Tensor3::set_slice(std::size_t l, const Matrix& m) {
  if (m.rows() != dims_.I || m.cols() != dims_.P || l >= dims_.L) {
    throw ShapeError("Tensor3::set_slice: slice shape or index out of range");
  }
  std::copy(m.data().begin(), m.data().end(), data_.begin() + dims_.I * dims_.P * l);
}

bool Tensor3::is_nonnegative() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return x >= 0.0; });
}

Matrix unfold(const Tensor3& t, Mode mode) {
  const auto [I, P, L] = t.dims();
  switch (mode) {
    case Mode::one:
      return Matrix(I, P * L, t.vec());
    case Mode::two: {
      Matrix m(P, I * L);
      for (std::size_t l = 0; l < L; ++l)
        for (std::size_t p = 0; p < P; ++p)
          for (std::size_t i = 0; i < I; ++i) m(p, i + I * l) = t(i, p, l);
      return m;
    }
    case Mode::three: {
      Matrix m(L, I * P);
      for (std::size_t l = 0; l < L; ++l)
        for (std::size_t p = 0; p < P; ++p)
          for (std::size_t i = 0; i < I; ++i) m(l, i + I * p) = t(i, p, l);
      return m;
    }
  }
  throw ConfigError("unfold: invalid mode");
}

Tensor3 fold(const Matrix& m, Mode mode, Dims3 dims) {
  const auto [I, P, L] = dims;
  const std::size_t rows = dims.extent(static_cast<int>(mode));
  if (m.rows() != rows || m.rows() * m.cols() != dims.numel() || dims.numel() == 0) {
    throw ShapeError("fold: matrix " + shape_str(m.rows(), m.cols()) +
                     " does not match mode-" + std::to_string(static_cast<int>(mode)) +
                     " unfolding of " + std::to_string(I) + "x" + std::to_string(P) + "x" +
                     std::to_string(L));
  }
  Tensor3 t(dims);
  switch (mode) {
    case Mode::one:
      std::copy(m.data().begin(), m.data().end(), t.data().begin());
      break;
    case Mode::two:
      for (std::size_t l = 0; l < L; ++l)
        for (std::size_t p = 0; p < P; ++p)
          for (std::size_t i = 0; i < I; ++i) t(i, p, l) = m(p, i + I * l);
      break;
    case Mode::three:
      for (std::size_t l = 0; l < L; ++l)
        for (std::size_t p = 0; p < P; ++p)
          for (std::size_t i = 0; i < I; ++i) t(i, p, l) = m(l, i + I * p);
      break;
  }
  return t;
}

Tensor3 mode_n_product(const Tensor3& t, const Matrix& u, Mode mode) {
  const int n = static_cast<int>(mode);
  const Dims3 in = t.dims();
  if (u.cols() != in.extent(n)) {
    throw ShapeError("mode_n_product: matrix " + shape_str(u.rows(), u.cols()) +
                     " cannot contract tensor extent " + std::to_string(in.extent(n)) +
                     " along mode " + std::to_string(n));
  }
  // Z_(n) = U * X_(n); all three unfoldings share the same column order
  // convention, so folding the product gives the contracted tensor.
  Dims3 out = in;
  if (mode == Mode::one) out.I = u.rows();
  if (mode == Mode::two) out.P = u.rows();
  if (mode == Mode::three) out.L = u.rows();
  return fold(matmul(u, unfold(t, mode)), mode, out);
}

Matrix khatri_rao(const Matrix& a, const Matrix& b) {
  const std::size_t J = checked_cols(a, b, "khatri_rao");
  const std::size_t R = b.rows();
  Matrix out(a.rows() * R, J);
  for (std::size_t j = 0; j < J; ++j) {
    for (std::size_t ia = 0; ia < a.rows(); ++ia) {
      const double s = a(ia, j);
      for (std::size_t r = 0; r < R; ++r) out(ia * R + r, j) = s * b(r, j);
    }
  }
  return out;
}

Tensor3 cp_reconstruct(const Matrix& w, const Matrix& h, const Matrix& v) {
  const std::size_t J = checked_cols(w, h, "cp_reconstruct");
  checked_cols(w, v, "cp_reconstruct");
  const Dims3 dims{w.rows(), h.rows(), v.rows()};
  Tensor3 q(dims);
  std::vector<double> kr(J);
  for (std::size_t l = 0; l < dims.L; ++l) {
    for (std::size_t p = 0; p < dims.P; ++p) {
      for (std::size_t j = 0; j < J; ++j) kr[j] = h(p, j) * v(l, j);
      double* out = q.data().data() + q.offset(0, p, l);
      for (std::size_t j = 0; j < J; ++j) {
        const double* wj = w.col(j).data();
        const double c = kr[j];
        for (std::size_t i = 0; i < dims.I; ++i) out[i] += wj[i] * c;
      }
    }
  }
  return q;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: " + shape_str(a.rows(), a.cols()) + " * " +
                     shape_str(b.rows(), b.cols()));
  }
  Matrix c(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    double* cj = c.col(j).data();
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double s = b(k, j);
      const double* ak = a.col(k).data();
      for (std::size_t i = 0; i < a.rows(); ++i) cj[i] += ak[i] * s;
    }
  }
  return c;
}

Matrix matmul_transposed(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw ShapeError("matmul_transposed: " + shape_str(a.rows(), a.cols()) + " * (" +
                     shape_str(b.rows(), b.cols()) + ")^T");
  }
  Matrix c(a.rows(), b.rows());
  for (std::size_t j = 0; j < b.rows(); ++j) {
    double* cj = c.col(j).data();
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double s = b(j, k);
      const double* ak = a.col(k).data();
      for (std::size_t i = 0; i < a.rows(); ++i) cj[i] += ak[i] * s;
    }
  }
  return c;
}

Matrix gram(const Matrix& a) {
  Matrix g(a.cols(), a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) {
    for (std::size_t k = 0; k <= j; ++k) {
      double s = 0.0;
      const auto aj = a.col(j);
      const auto ak = a.col(k);
      for (std::size_t i = 0; i < a.rows(); ++i) s += aj[i] * ak[i];
      g(j, k) = s;
      g(k, j) = s;
    }
  }
  return g;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) t(j, i) = a(i, j);
  return t;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("hadamard: " + shape_str(a.rows(), a.cols()) + " vs " +
                     shape_str(b.rows(), b.cols()));
  }
  Matrix c(a.rows(), a.cols());
  for (std::size_t k = 0; k < a.size(); ++k) c.data()[k] = a.data()[k] * b.data()[k];
  return c;
}

double frobenius_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("max_abs_diff: length mismatch");
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace bearingntf
