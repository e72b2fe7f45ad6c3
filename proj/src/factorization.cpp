// SPDX-License-Identifier: Apache-2.0
#include "bearingntf/factorization.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "bearingntf/error.hpp"
#include "bearingntf/random.hpp"

namespace bearingntf {

namespace {

enum class BetaCase { eu, kl, is, general };

BetaCase classify(double beta) {
  if (beta == 1.0) return BetaCase::eu;
  if (beta == 0.0) return BetaCase::kl;
  if (beta == -1.0) return BetaCase::is;
  if (beta > 0.0) return BetaCase::general;
  throw ConfigError("beta must be 1, 0, -1 or positive, got " + std::to_string(beta));
}

// Per-entry divergence with q already floored.
template <BetaCase C>
inline double entry_divergence(double y, double q, double beta, double epsilon) {
  if constexpr (C == BetaCase::eu) {
    const double d = y - q;
    return 0.5 * d * d;
  } else if constexpr (C == BetaCase::kl) {
    return y > 0.0 ? y * std::log(y / q) - y + q : q;
  } else if constexpr (C == BetaCase::is) {
    const double yf = std::max(y, epsilon);
    return std::log(q / yf) + y / q - 1.0;
  } else {
    return y * (std::pow(y, beta) - std::pow(q, beta)) / beta -
           (std::pow(y, beta + 1.0) - std::pow(q, beta + 1.0)) / (beta + 1.0);
  }
}

template <BetaCase C>
double divergence_impl(std::span<const double> y, std::span<const double> q, double beta,
                       double epsilon) {
  double s = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    const double qk = C == BetaCase::eu || C == BetaCase::general ? q[k] : std::max(q[k], epsilon);
    s += entry_divergence<C>(y[k], qk, beta, epsilon);
  }
  return s;
}

// Fixed-order 4-lane reductions: vectorizable without reassociation flags and
// still bit-reproducible.
inline double dot(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

inline double squared_distance(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const double d0 = a[i] - b[i];
    const double d1 = a[i + 1] - b[i + 1];
    const double d2 = a[i + 2] - b[i + 2];
    const double d3 = a[i + 3] - b[i + 3];
    s0 += d0 * d0;
    s1 += d1 * d1;
    s2 += d2 * d2;
    s3 += d3 * d3;
  }
  for (; i < n; ++i) s0 += (a[i] - b[i]) * (a[i] - b[i]);
  return (s0 + s1) + (s2 + s3);
}

// z = y * q^(beta-1) and g = q^beta over a fiber, q floored at epsilon.
template <BetaCase C>
inline void ratio_terms(const double* y, const double* q, double* z, double* g, std::size_t n,
                        double beta, double epsilon) {
  for (std::size_t i = 0; i < n; ++i) {
    const double qf = std::max(q[i], epsilon);
    if constexpr (C == BetaCase::eu) {
      z[i] = y[i];
      g[i] = qf;
    } else if constexpr (C == BetaCase::kl) {
      z[i] = y[i] / qf;
      g[i] = 1.0;
    } else if constexpr (C == BetaCase::is) {
      const double r = 1.0 / qf;
      z[i] = y[i] * r * r;
      g[i] = r;
    } else {
      const double pb = std::pow(qf, beta);
      z[i] = y[i] * pb / qf;
      g[i] = pb;
    }
  }
}

template <BetaCase C>
detail::PassResult fused_pass_impl(std::span<const double> y, Dims3 dims, const Matrix& w,
                                   const Matrix& h, const Matrix& v, double beta, double epsilon,
                                   Mode mode, bool with_objective) {
  const auto [I, P, L] = dims;
  const std::size_t J = w.cols();
  const std::size_t rows = dims.extent(static_cast<int>(mode));

  detail::PassResult out;
  out.terms.positive = Matrix(rows, J);
  out.terms.negative = Matrix(rows, J);

  std::vector<double> kr(J), q(I), z(I), g(I), a(J), b(J);
  double sq = 0.0;
  double obj = 0.0;

  for (std::size_t l = 0; l < L; ++l) {
    for (std::size_t p = 0; p < P; ++p) {
      for (std::size_t j = 0; j < J; ++j) kr[j] = h(p, j) * v(l, j);
      const double* yf = y.data() + I * (p + P * l);

      std::fill(q.begin(), q.end(), 0.0);
      for (std::size_t j = 0; j < J; ++j) {
        const double* wj = w.col(j).data();
        const double c = kr[j];
        for (std::size_t i = 0; i < I; ++i) q[i] += wj[i] * c;
      }
      if (mode == Mode::one) sq += squared_distance(yf, q.data(), I);
      if (with_objective) {
        for (std::size_t i = 0; i < I; ++i) {
          const double qk = C == BetaCase::eu || C == BetaCase::general ? q[i]
                                                                       : std::max(q[i], epsilon);
          obj += entry_divergence<C>(yf[i], qk, beta, epsilon);
        }
      }
      ratio_terms<C>(yf, q.data(), z.data(), g.data(), I, beta, epsilon);

      if (mode == Mode::one) {
        for (std::size_t j = 0; j < J; ++j) {
          double* num = out.terms.negative.col(j).data();
          double* den = out.terms.positive.col(j).data();
          const double c = kr[j];
          for (std::size_t i = 0; i < I; ++i) {
            num[i] += z[i] * c;
            den[i] += g[i] * c;
          }
        }
        continue;
      }

      for (std::size_t j = 0; j < J; ++j) {
        const double* wj = w.col(j).data();
        a[j] = dot(z.data(), wj, I);
        b[j] = dot(g.data(), wj, I);
      }
      if (mode == Mode::two) {
        for (std::size_t j = 0; j < J; ++j) {
          out.terms.negative(p, j) += a[j] * v(l, j);
          out.terms.positive(p, j) += b[j] * v(l, j);
        }
      } else {
        for (std::size_t j = 0; j < J; ++j) {
          out.terms.negative(l, j) += a[j] * h(p, j);
          out.terms.positive(l, j) += b[j] * h(p, j);
        }
      }
    }
  }
  out.sq_residual = sq;
  out.objective = obj;
  return out;
}

void check_data(std::span<const double> y) {
  double sq = 0.0;
  for (double x : y) {
    if (!std::isfinite(x)) throw DataError("factorization: input contains non-finite values");
    if (x < 0.0) throw DataError("factorization: input contains negative values");
    sq += x * x;
  }
  if (sq == 0.0) throw DataError("factorization: input is all zeros");
}

Matrix random_factor(std::size_t rows, std::size_t cols, CounterRng& rng) {
  Matrix m(rows, cols);
  for (auto& x : m.data()) x = rng.uniform_open0();
  return m;
}

void multiplicative_update(Matrix& f, const GradientTerms& t, double epsilon, const char* name) {
  auto fd = f.data();
  auto num = t.negative.data();
  auto den = t.positive.data();
  for (std::size_t k = 0; k < fd.size(); ++k) fd[k] *= num[k] / std::max(den[k], epsilon);
  if (!f.all_finite()) {
    throw NumericalError(std::string("factorization: factor ") + name + " became non-finite");
  }
}

void scale_columns_into(Matrix& f, Matrix& target) {
  for (std::size_t j = 0; j < f.cols(); ++j) {
    const double n = frobenius_norm(f.col(j));
    if (n == 0.0) continue;
    for (auto& x : f.col(j)) x /= n;
    for (auto& x : target.col(j)) x *= n;
  }
}

void check_factor(const Matrix& m, std::size_t rows, std::size_t rank, const char* name) {
  if (m.rows() != rows || m.cols() != rank) {
    throw ShapeError(std::string("initial factor ") + name + " has wrong shape");
  }
  if (!m.is_nonnegative() || !m.all_finite()) {
    throw DataError(std::string("initial factor ") + name + " must be finite and non-negative");
  }
}

// Shared multiplicative-update loop over an (I, P, L) array. NMF runs it with
// L = 1 and V fixed at ones, which is exactly the two-factor model.
template <BetaCase C>
FactorSet run_mu(std::span<const double> y, Dims3 dims, const FitOptions& opts,
                 const std::optional<InitialFactors>& init, bool update_v, bool normalize) {
  const std::size_t J = opts.rank;
  FactorSet f;
  if (init) {
    check_factor(init->W, dims.I, J, "W");
    check_factor(init->H, dims.P, J, "H");
    f.W = init->W;
    f.H = init->H;
  } else {
    CounterRng rng(derive_seed(opts.seed, "init"));
    f.W = random_factor(dims.I, J, rng);
    f.H = random_factor(dims.P, J, rng);
  }
  Matrix v(dims.L, J, 1.0);
  if (update_v) {
    if (init && init->V) {
      check_factor(*init->V, dims.L, J, "V");
      v = *init->V;
    } else if (!init) {
      CounterRng rng(derive_seed(opts.seed, "init-v"));
      v = random_factor(dims.L, J, rng);
    }
  }

  const double ynorm = frobenius_norm(y);
  double prev_residual = 0.0;
  std::size_t iter = 0;
  for (;; ++iter) {
    auto pw = fused_pass_impl<C>(y, dims, f.W, f.H, v, opts.beta, opts.epsilon, Mode::one,
                                 opts.record_history);
    const double residual = std::sqrt(pw.sq_residual) / ynorm;
    f.history.residual.push_back(residual);
    if (opts.record_history) f.history.objective.push_back(pw.objective);
    if (iter > 0 && std::abs(prev_residual - residual) < opts.tol) {
      f.converged = true;
      break;
    }
    if (iter == opts.max_iters) break;
    prev_residual = residual;

    multiplicative_update(f.W, pw.terms, opts.epsilon, "W");
    auto ph = fused_pass_impl<C>(y, dims, f.W, f.H, v, opts.beta, opts.epsilon, Mode::two, false);
    multiplicative_update(f.H, ph.terms, opts.epsilon, "H");
    if (update_v) {
      auto pv =
          fused_pass_impl<C>(y, dims, f.W, f.H, v, opts.beta, opts.epsilon, Mode::three, false);
      multiplicative_update(v, pv.terms, opts.epsilon, "V");
    }
    if (normalize) {
      scale_columns_into(f.W, v);
      scale_columns_into(f.H, v);
    }
  }
  f.iterations = iter;
  if (update_v || dims.L > 1) f.V = std::move(v);
  return f;
}

template <typename... Args>
FactorSet dispatch_mu(double beta, Args&&... args) {
  switch (classify(beta)) {
    case BetaCase::eu: return run_mu<BetaCase::eu>(std::forward<Args>(args)...);
    case BetaCase::kl: return run_mu<BetaCase::kl>(std::forward<Args>(args)...);
    case BetaCase::is: return run_mu<BetaCase::is>(std::forward<Args>(args)...);
    case BetaCase::general: return run_mu<BetaCase::general>(std::forward<Args>(args)...);
  }
  throw ConfigError("unreachable beta case");
}

Matrix elementwise_pow(const Matrix& m, double e, double epsilon) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t k = 0; k < m.size(); ++k) {
    const double x = std::max(m.data()[k], epsilon);
    out.data()[k] = e == 1.0 ? m.data()[k] : e == 0.0 ? 1.0 : std::pow(x, e);
  }
  return out;
}

Matrix scale_columns(const Matrix& m, std::span<const double> s) {
  Matrix out = m;
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (auto& x : out.col(j)) x *= s[j];
  return out;
}

}  // namespace

double beta_from_string(const std::string& name) {
  if (name == "eu" || name == "EU") return beta::eu;
  if (name == "kl" || name == "KL") return beta::kl;
  if (name == "is" || name == "IS") return beta::is;
  double b = 0.0;
  const auto [ptr, ec] = std::from_chars(name.data(), name.data() + name.size(), b);
  if (ec != std::errc{} || ptr != name.data() + name.size()) {
    throw ConfigError("unknown beta: " + name + " (expected eu, kl, is or a number)");
  }
  classify(b);
  return b;
}

std::string beta_name(double beta) {
  if (beta == beta::eu) return "eu";
  if (beta == beta::kl) return "kl";
  if (beta == beta::is) return "is";
  return std::to_string(beta);
}

void FitOptions::validate() const {
  if (rank < 1) throw ConfigError("fit: rank must be >= 1");
  if (max_iters < 1) throw ConfigError("fit: max_iters must be >= 1");
  if (!(tol >= 0.0)) throw ConfigError("fit: tol must be >= 0");
  if (!(epsilon > 0.0)) throw ConfigError("fit: epsilon must be > 0");
  classify(beta);
}

double beta_divergence(std::span<const double> y, std::span<const double> q, double beta,
                       double epsilon) {
  if (y.size() != q.size()) throw ShapeError("beta_divergence: shape mismatch");
  switch (classify(beta)) {
    case BetaCase::eu: return divergence_impl<BetaCase::eu>(y, q, beta, epsilon);
    case BetaCase::kl: return divergence_impl<BetaCase::kl>(y, q, beta, epsilon);
    case BetaCase::is: return divergence_impl<BetaCase::is>(y, q, beta, epsilon);
    case BetaCase::general: return divergence_impl<BetaCase::general>(y, q, beta, epsilon);
  }
  return 0.0;
}

double beta_divergence(const Tensor3& y, const Tensor3& q, double beta, double epsilon) {
  if (!(y.dims() == q.dims())) throw ShapeError("beta_divergence: tensor dims differ");
  return beta_divergence(y.data(), q.data(), beta, epsilon);
}

double beta_divergence(const Matrix& y, const Matrix& q, double beta, double epsilon) {
  if (y.rows() != q.rows() || y.cols() != q.cols()) {
    throw ShapeError("beta_divergence: matrix shapes differ");
  }
  return beta_divergence(y.data(), q.data(), beta, epsilon);
}

Matrix GradientTerms::gradient() const {
  Matrix g = positive;
  for (std::size_t k = 0; k < g.size(); ++k) g.data()[k] -= negative.data()[k];
  return g;
}

GradientTerms beta_gradient_terms(const Tensor3& y, const Matrix& w, const Matrix& h,
                                  const Matrix& v, double beta, Mode mode, double epsilon) {
  classify(beta);
  const Tensor3 q = cp_reconstruct(w, h, v);
  if (!(q.dims() == y.dims())) throw ShapeError("beta_gradient_terms: factors do not match data");
  const Matrix yn = unfold(y, mode);
  const Matrix qn = unfold(q, mode);
  Matrix b;
  switch (mode) {
    case Mode::one: b = khatri_rao(v, h); break;
    case Mode::two: b = khatri_rao(v, w); break;
    case Mode::three: b = khatri_rao(h, w); break;
  }
  const Matrix qb = elementwise_pow(qn, beta, epsilon);
  const Matrix z = hadamard(yn, elementwise_pow(qn, beta - 1.0, epsilon));
  return {matmul(qb, b), matmul(z, b)};
}

GradientTerms eu_gradient_terms_simplified(const Tensor3& y, const Matrix& w, const Matrix& h,
                                           const Matrix& v, Mode mode) {
  if (mode == Mode::three) {
    return {matmul(v, hadamard(gram(h), gram(w))),
            matmul(unfold(y, Mode::three), khatri_rao(h, w))};
  }
  const Matrix sv = gram(v);
  const Matrix& own = mode == Mode::one ? w : h;
  const Matrix& other = mode == Mode::one ? h : w;
  GradientTerms t;
  t.positive = matmul(own, hadamard(sv, gram(other)));
  t.negative = Matrix(own.rows(), own.cols());
  // Row v_l of V scales the columns of the companion factor slice by slice.
  std::vector<double> vl(v.cols());
  for (std::size_t l = 0; l < y.dims().L; ++l) {
    for (std::size_t j = 0; j < v.cols(); ++j) vl[j] = v(l, j);
    const Matrix yl = mode == Mode::one ? y.slice(l) : transpose(y.slice(l));
    const Matrix prod = matmul(yl, scale_columns(other, vl));
    for (std::size_t k = 0; k < prod.size(); ++k) t.negative.data()[k] += prod.data()[k];
  }
  return t;
}

FactorSet nmf(const Matrix& y, const FitOptions& opts, const std::optional<InitialFactors>& init) {
  opts.validate();
  check_data(y.data());
  const Dims3 dims{y.rows(), y.cols(), 1};
  FactorSet f = dispatch_mu(opts.beta, y.data(), dims, opts, init, false, false);
  f.V.reset();
  // Unit-norm time profiles; W carries the scale.
  for (std::size_t j = 0; j < f.H.cols(); ++j) {
    const double n = frobenius_norm(f.H.col(j));
    if (n == 0.0) continue;
    for (auto& x : f.H.col(j)) x /= n;
    for (auto& x : f.W.col(j)) x *= n;
  }
  return f;
}

FactorSet ntf(const Tensor3& y, const FitOptions& opts, const std::optional<InitialFactors>& init) {
  opts.validate();
  check_data(y.data());
  const bool update_v = !opts.freeze_fold_weights;
  FactorSet f = dispatch_mu(opts.beta, y.data(), y.dims(), opts, init, update_v, update_v);
  if (!f.V) f.V = Matrix(y.dims().L, opts.rank, 1.0);
  return f;
}

FactorSet normalize_factors(FactorSet f) {
  if (!f.V) throw ConfigError("normalize_factors: factor set has no V (not an NTF result)");
  if (f.W.cols() != f.H.cols() || f.W.cols() != f.V->cols()) {
    throw ShapeError("normalize_factors: rank mismatch");
  }
  scale_columns_into(f.W, *f.V);
  scale_columns_into(f.H, *f.V);
  return f;
}

namespace detail {

PassResult fused_pass(std::span<const double> y, Dims3 dims, const Matrix& w, const Matrix& h,
                      const Matrix& v, double beta, double epsilon, Mode mode,
                      bool with_objective) {
  if (y.size() != dims.numel() || w.rows() != dims.I || h.rows() != dims.P || v.rows() != dims.L ||
      w.cols() != h.cols() || w.cols() != v.cols()) {
    throw ShapeError("fused_pass: factor shapes do not match data");
  }
  switch (classify(beta)) {
    case BetaCase::eu:
      return fused_pass_impl<BetaCase::eu>(y, dims, w, h, v, beta, epsilon, mode, with_objective);
    case BetaCase::kl:
      return fused_pass_impl<BetaCase::kl>(y, dims, w, h, v, beta, epsilon, mode, with_objective);
    case BetaCase::is:
      return fused_pass_impl<BetaCase::is>(y, dims, w, h, v, beta, epsilon, mode, with_objective);
    case BetaCase::general:
      return fused_pass_impl<BetaCase::general>(y, dims, w, h, v, beta, epsilon, mode,
                                                with_objective);
  }
  throw ConfigError("unreachable beta case");
}

}  // namespace detail

}  // namespace bearingntf
