#pragma once

#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "huberbench/data.hpp"
#include "huberbench/loss.hpp"

namespace huberbench {

/// Step 1/L with L estimated by power iteration on the design.
struct FixedFromLipschitz {};
/// Armijo-type backtracking on the smooth part, shrinking the step by `beta`.
struct Backtracking {
  double beta = 0.5;
};
using StepRule = std::variant<FixedFromLipschitz, Backtracking>;

enum class SolverMethod {
  ProximalGradient,
  /// Primal-dual interior point on the equivalent bound-constrained QP.
  /// l1-penalized fits only; step_rule and acceleration are ignored.
  InteriorPoint,
};

struct SolverConfig {
  SolverMethod method = SolverMethod::ProximalGradient;
  int max_iter = 20000;
  /// Stationarity tolerance on the (prox-)gradient residual.
  double tol = 1e-8;
  StepRule step_rule = FixedFromLipschitz{};
  /// Monotone accelerated proximal gradient with function-value restart.
  bool acceleration = false;

  void validate() const;
};

struct FitResult {
  VectorXd coefficients;
  /// Objective at the starting point and after every iteration.
  std::vector<double> objective_trace;
  bool converged = false;
  /// ||grad|| for smooth problems; ||x - prox(x - tau grad)|| / tau otherwise
  /// (tau = N / ||A||_F^2 for interior-point fits).
  double stationarity_residual = 0.0;
  int iterations = 0;
  /// ERM only: the Hessian proxy (design rows in the quadratic zone) is rank
  /// deficient, so the minimizer need not be unique.
  bool non_unique = false;
  /// RKHS fits: representer weights alpha with f = sum_i alpha_i K(x_i, .).
  std::optional<VectorXd> representer_weights;
};

struct ErrorNorms {
  double l2 = 0.0;
  double l1 = 0.0;
  /// ||Sigma^{1/2} (t_hat - t*)||_2.
  double weighted = 0.0;
};

/// (1/N) sum huber(<X_i, t>, Y_i) + lambda ||t||_1, the quantity the linear
/// solvers minimize.
double objective_eval(const ContaminatedDataset& data, const HuberParams& params, double lambda,
                      const VectorXd& t);

/// Componentwise sign(v) max(|v| - threshold, 0).
VectorXd soft_threshold(const VectorXd& v, double threshold);

/// Largest eigenvalue of A^T A by power iteration (deterministic start).
double operator_norm_squared(const MatrixXd& a, int max_iter = 500, double rel_tol = 1e-9);

/// Unpenalized Huber ERM by gradient descent.
FitResult fit_erm_huber(const ContaminatedDataset& data, const HuberParams& params,
                        const SolverConfig& cfg = {});

/// l1-penalized Huber by proximal gradient with soft thresholding.
FitResult fit_l1_huber(const ContaminatedDataset& data, const HuberParams& params, double lambda,
                       const SolverConfig& cfg = {});

/// Ordinary least squares baseline (column-pivoting QR).
FitResult fit_ols(const ContaminatedDataset& data);

ErrorNorms estimate_error(const FitResult& result, const GroundTruth& truth,
                          const GaussianDesignSpec& design_spec);

namespace detail {

enum class Penalty { None, L1, GroupL2 };

/// Minimizes (1/N) sum huber((A x)_i, y_i) + lambda * pen(x) with pen the l1
/// norm (Penalty::L1) or the Euclidean norm (Penalty::GroupL2). Shared by the
/// linear and RKHS estimators.
FitResult minimize_huber_composite(const MatrixXd& a, const VectorXd& y, const HuberParams& params,
                                   Penalty penalty, double lambda, const SolverConfig& cfg);

/// Interior-point counterpart of minimize_huber_composite for Penalty::L1.
FitResult minimize_huber_l1_ipm(const MatrixXd& a, const VectorXd& y, const HuberParams& params, double lambda,
                                const SolverConfig& cfg);

/// Block soft thresholding: (1 - threshold / ||v||)_+ v.
VectorXd group_shrink(const VectorXd& v, double threshold);

}  // namespace detail

}  // namespace huberbench
