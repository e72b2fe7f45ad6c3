// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bearingntf {

// Dense column-major matrix of doubles: element (r, c) lives at r + rows*c,
// so every column is a contiguous span.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  // Row-major nested initializer, convenient for small literals in tests:
  // Matrix::from_rows({{1, 2}, {3, 4}}).
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);
  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r + rows_ * c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r + rows_ * c]; }

  std::span<double> col(std::size_t c) noexcept { return {data_.data() + rows_ * c, rows_}; }
  std::span<const double> col(std::size_t c) const noexcept {
    return {data_.data() + rows_ * c, rows_};
  }
  std::vector<double> col_copy(std::size_t c) const;

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  const std::vector<double>& vec() const noexcept { return data_; }

  bool is_nonnegative() const noexcept;
  bool all_finite() const noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct Dims3 {
  std::size_t I = 0;  // frequency bins
  std::size_t P = 0;  // frames per fold
  std::size_t L = 0;  // folds

  std::size_t numel() const noexcept { return I * P * L; }
  std::size_t extent(int mode) const;
  friend bool operator==(const Dims3&, const Dims3&) = default;
};

// Tensor modes are numbered 1..3 as in the usual unfolding notation.
enum class Mode : int { one = 1, two = 2, three = 3 };

Mode mode_from_int(int mode);

// Dense 3-way array. Storage order: the frequency index i varies fastest,
// then the frame index p, then the fold index l:
//
//   offset(i, p, l) = i + I * (p + P * l)
//
// With this order the mode-1 unfolding is the same memory block viewed as an
// I x (P*L) column-major matrix, and each lateral slice Y_l is a contiguous
// I x P column-major block.
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(Dims3 dims, double fill = 0.0);
  Tensor3(Dims3 dims, std::vector<double> data);

  // Entry (i, p, l) = i + I*p + I*P*l; used for the enumerated index tests.
  static Tensor3 iota(Dims3 dims, double start = 1.0);

  const Dims3& dims() const noexcept { return dims_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::size_t offset(std::size_t i, std::size_t p, std::size_t l) const noexcept {
    return i + dims_.I * (p + dims_.P * l);
  }
  double& operator()(std::size_t i, std::size_t p, std::size_t l) noexcept {
    return data_[offset(i, p, l)];
  }
  double operator()(std::size_t i, std::size_t p, std::size_t l) const noexcept {
    return data_[offset(i, p, l)];
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  const std::vector<double>& vec() const noexcept { return data_; }

  // Lateral slice Y_l (I x P).
  std::span<const double> slice_span(std::size_t l) const noexcept {
    return {data_.data() + dims_.I * dims_.P * l, dims_.I * dims_.P};
  }
  Matrix slice(std::size_t l) const;
  void set_slice(std::size_t l, const Matrix& m);

  bool is_nonnegative() const noexcept;

  friend bool operator==(const Tensor3&, const Tensor3&) = default;

 private:
  Dims3 dims_;
  std::vector<double> data_;
};

// Mode-n unfolding. Column index for mode 1 is p + P*l, for mode 2 it is
// i + I*l, for mode 3 it is i + I*p (zero-based form of the classic map
// j = 1 + sum_{k != n} (i_k - 1) j_k).
Matrix unfold(const Tensor3& t, Mode mode);

// Inverse of unfold. Throws ShapeError if m does not have the unfolded shape.
Tensor3 fold(const Matrix& m, Mode mode, Dims3 dims);

// Z = T x_n U with U of shape (J x I_n).
Tensor3 mode_n_product(const Tensor3& t, const Matrix& u, Mode mode);

// Column-wise Kronecker product: row a*b.rows() + r of column j is a(a,j)*b(r,j).
Matrix khatri_rao(const Matrix& a, const Matrix& b);

// q_{ipl} = sum_j w_{ij} h_{pj} v_{lj}.
Tensor3 cp_reconstruct(const Matrix& w, const Matrix& h, const Matrix& v);

// Small dense helpers used by the factorization and the tests.
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix matmul_transposed(const Matrix& a, const Matrix& b);  // a * b^T
Matrix gram(const Matrix& a);                                // a^T * a
Matrix transpose(const Matrix& a);
Matrix hadamard(const Matrix& a, const Matrix& b);
double frobenius_norm(std::span<const double> x);
double max_abs_diff(std::span<const double> a, std::span<const double> b);

}  // namespace bearingntf
