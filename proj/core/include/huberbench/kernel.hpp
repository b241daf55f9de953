#pragma once

#include <span>
#include <variant>

#include <Eigen/Dense>

#include "huberbench/data.hpp"
#include "huberbench/loss.hpp"
#include "huberbench/solvers.hpp"

namespace huberbench {

/// exp(-||x - y||^2 / (2 h^2)); K(x, x) = 1 everywhere.
struct GaussianRbf {
  double bandwidth = 1.0;
};

/// ((<x, y> + offset) / (1 + offset))^degree on the unit ball ||x|| <= 1,
/// where K(x, x) <= 1.
struct PolynomialKernel {
  int degree = 2;
  double offset = 1.0;
};

class Kernel {
 public:
  using Kind = std::variant<GaussianRbf, PolynomialKernel>;

  explicit Kernel(Kind kind);
  static Kernel rbf(double bandwidth) { return Kernel(GaussianRbf{bandwidth}); }
  static Kernel polynomial(int degree, double offset) { return Kernel(PolynomialKernel{degree, offset}); }

  const Kind& kind() const { return kind_; }
  double operator()(const Eigen::Ref<const VectorXd>& x, const Eigen::Ref<const VectorXd>& y) const;
  /// Cross matrix K(a_i, b_j) for row-point matrices a and b.
  MatrixXd cross(const MatrixXd& a, const MatrixXd& b) const;

 private:
  Kind kind_;
};

/// Eigenvalues below this are treated as zero in the square root and in the
/// pseudo-inverse square root.
inline constexpr double kGramEigenFloor = 1e-10;

struct GramFactorization {
  MatrixXd gram;
  /// Nonincreasing. Slightly negative values from rounding are kept here and
  /// clipped in sqrt_factor.
  VectorXd eigenvalues;
  MatrixXd eigenvectors;
  /// Symmetric K^{1/2}.
  MatrixXd sqrt_factor;
  double min_eigenvalue = 0.0;
  /// min eigenvalue below -1e-8: the kernel was not PSD on these points.
  bool indefinite = false;

  /// K^{+1/2} v restricted to eigenvalues above kGramEigenFloor.
  VectorXd apply_inverse_sqrt(const VectorXd& v) const;
};

GramFactorization gram_matrix(const Kernel& kernel, const MatrixXd& points);

/// Huber loss with Hilbert-norm (not squared) penalty:
///   min_f (1/N) sum huber(f(X_i), Y_i) + lambda ||f||_H.
/// f is restricted to span{K(x_i, .)} and reparametrized as beta = K^{1/2} alpha,
/// so ||f||_H = ||beta||_2 and the penalty's prox is a group shrinkage.
/// coefficients holds beta; representer_weights holds alpha.
FitResult fit_rkhs_huber(const GramFactorization& gram, const VectorXd& labels, const HuberParams& params,
                         double lambda, const SolverConfig& cfg = {});
FitResult fit_rkhs_huber(const MatrixXd& points, const VectorXd& labels, const Kernel& kernel,
                         const HuberParams& params, double lambda, const SolverConfig& cfg = {});

/// ||f||_H = sqrt(alpha^T K alpha).
double rkhs_norm(const GramFactorization& gram, const VectorXd& alpha);

/// f(x) = sum_i alpha_i K(x_i, x) for each query row.
VectorXd predict(const FitResult& fit, const Kernel& kernel, const MatrixXd& train_points,
                 const MatrixXd& query_points);

struct SpectrumFit {
  /// Decay exponent p with lambda_k ~ k^{-1/p}.
  double p_hat = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int points_used = 0;
  /// 0 < p_hat < 1 (strict), the range required by the decay assumption.
  bool in_assumption_range = false;
};

struct SpectrumRange {
  int k_min = 1;
  /// 0 means "up to n_used".
  int k_max = 0;
};

/// Least squares fit of log lambda_k against log k, k in [k_min, min(k_max, n_used)],
/// over the eigenvalues of K/N. Eigenvalues <= 1e-14 * lambda_1 are skipped.
SpectrumFit estimate_spectrum_decay(const GramFactorization& fac, int n_used, SpectrumRange range = {});
/// Same fit on an explicit nonincreasing eigenvalue sequence (index k = position + 1).
SpectrumFit estimate_spectrum_decay(std::span<const double> eigenvalues, SpectrumRange range = {});

}  // namespace huberbench
