// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bearingntf/tensor.hpp"

namespace bearingntf {

// beta-divergence family in the parameterization where
//   beta =  1  -> squared Euclidean distance (halved),
//   beta =  0  -> generalized Kullback-Leibler divergence,
//   beta = -1  -> Itakura-Saito distance.
// Any beta > 0 uses the generic power branch.
namespace beta {
inline constexpr double eu = 1.0;
inline constexpr double kl = 0.0;
inline constexpr double is = -1.0;
}  // namespace beta

// "eu" | "kl" | "is" (or a number) -> beta.
double beta_from_string(const std::string& name);
// 1 -> "eu", 0 -> "kl", -1 -> "is", otherwise the number.
std::string beta_name(double beta);

struct FitOptions {
  std::size_t rank = 2;
  double beta = beta::eu;
  std::size_t max_iters = 100;
  // Stop once the normalized residual ||Y - Q||_F / ||Y||_F changes by less
  // than tol between consecutive iterations.
  double tol = 1e-5;
  double epsilon = 1e-12;
  std::uint64_t seed = 0;
  // Evaluate the beta-divergence after every iteration. The residual is
  // always tracked since the stopping rule needs it.
  bool record_history = true;
  // NTF only: hold V at all ones and skip its update (and the column
  // normalization, which would move scale into V).
  bool freeze_fold_weights = false;

  void validate() const;
};

struct FitHistory {
  // Entry 0 is the initial point, entry k the state after k iterations.
  std::vector<double> objective;
  std::vector<double> residual;
};

struct FactorSet {
  Matrix W;                 // I x J frequency profiles
  Matrix H;                 // P x J (NTF) or K x J (NMF) time profiles
  std::optional<Matrix> V;  // L x J fold weights, NTF only
  FitHistory history;
  bool converged = false;
  std::size_t iterations = 0;

  std::size_t rank() const noexcept { return W.cols(); }
};

// Starting point for a fit; when absent, factors are drawn i.i.d. uniform on
// (0, 1] from the seeded generator.
struct InitialFactors {
  Matrix W;
  Matrix H;
  std::optional<Matrix> V;
};

// Sum over entries of the beta-divergence D(y || q). For beta <= 0 the model
// values are floored at epsilon; for beta = -1 zero data entries are floored
// too so that log(q / y) stays finite.
double beta_divergence(std::span<const double> y, std::span<const double> q, double beta,
                       double epsilon = 1e-12);
double beta_divergence(const Tensor3& y, const Tensor3& q, double beta, double epsilon = 1e-12);
double beta_divergence(const Matrix& y, const Matrix& q, double beta, double epsilon = 1e-12);

// Gradient of the beta-divergence with respect to one CP factor, split into
// the two non-negative parts G = positive - negative:
//   positive = (Q_(n))^{.beta} B_n,  negative = (Y_(n) * Q_(n)^{.beta-1}) B_n
// with B_1 = V (.) H, B_2 = V (.) W, B_3 = H (.) W (Khatri-Rao products).
// The multiplicative update is factor <- factor * negative / positive.
struct GradientTerms {
  Matrix positive;
  Matrix negative;
  Matrix gradient() const;
};

// Direct route: explicit unfoldings and Khatri-Rao products.
GradientTerms beta_gradient_terms(const Tensor3& y, const Matrix& w, const Matrix& h,
                                  const Matrix& v, double beta, Mode mode,
                                  double epsilon = 1e-12);

// Euclidean (beta = 1) terms through Gram matrices and lateral slices:
//   mode 1: W (V^T V * H^T H),  sum_l Y_l H diag(v_l)
//   mode 2: H (V^T V * W^T W),  sum_l Y_l^T W diag(v_l)
//   mode 3: V (H^T H * W^T W),  Y_(3) (H (.) W)
GradientTerms eu_gradient_terms_simplified(const Tensor3& y, const Matrix& w, const Matrix& h,
                                           const Matrix& v, Mode mode);

// Matrix model Y ~ W H^T with multiplicative updates (W then H). On return the
// columns of H have unit l2 norm, scale carried by W.
FactorSet nmf(const Matrix& y, const FitOptions& opts,
              const std::optional<InitialFactors>& init = std::nullopt);

// CP model Y ~ I x1 W x2 H x3 V with multiplicative updates W -> H -> V, the
// model refreshed before each factor. After each sweep the columns of W and H
// are scaled to unit l2 norm and the scale is moved into V.
FactorSet ntf(const Tensor3& y, const FitOptions& opts,
              const std::optional<InitialFactors>& init = std::nullopt);

// Unit l2 columns for W and H, V absorbs both scales. Zero columns stay as is.
FactorSet normalize_factors(FactorSet f);

namespace detail {

// The fused kernel used by the fits: terms for one factor plus the squared
// residual and (optionally) the objective of the current model, in one pass
// over the data.
struct PassResult {
  GradientTerms terms;
  double sq_residual = 0.0;
  double objective = 0.0;
};

PassResult fused_pass(std::span<const double> y, Dims3 dims, const Matrix& w, const Matrix& h,
                      const Matrix& v, double beta, double epsilon, Mode mode,
                      bool with_objective);

}  // namespace detail

}  // namespace bearingntf
