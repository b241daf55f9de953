#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "huberbench/data.hpp"
#include "huberbench/kernel.hpp"
#include "huberbench/solvers.hpp"

namespace huberbench {

struct ErmHuber {};
struct L1Huber {
  double lambda = 1e-3;
};
struct RkhsHuber {
  Kernel kernel{GaussianRbf{}};
  double lambda = 1e-3;
};
struct OlsBaseline {};

using Estimator = std::variant<ErmHuber, L1Huber, RkhsHuber, OlsBaseline>;

std::string estimator_name(const Estimator& estimator);

struct SweepConfig {
  Estimator estimator = ErmHuber{};
  int n = 1000;
  int dim = 50;
  /// Nonzeros of t*; the whole dimension when unset.
  std::optional<int> sparsity;
  double gamma = 1.0;
  std::vector<NoiseModel> noise_models;
  /// Sorted ascending, each in [0, 0.5]. The outlier count is round(fraction * n).
  std::vector<double> outlier_fractions;
  int trials = 20;
  std::uint64_t root_seed = 0;
  std::pair<double, double> outlier_range{-1e5, 1e5};
  /// Identity covariance when unset.
  std::optional<GaussianDesignSpec> design;
  SolverConfig solver;
  unsigned threads = 1;

  void validate() const;
  GaussianDesignSpec design_spec() const;
};

struct SweepRow {
  std::string noise;
  double fraction = 0.0;
  int trial = 0;
  double l2_error = 0.0;
  double l1_error = 0.0;
  double weighted_error = 0.0;
  int iterations = 0;
  bool converged = false;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct SweepResult {
  /// Ordered by (noise in config order, fraction, trial).
  std::vector<SweepRow> rows;
  /// True when the design is not isotropic; the summary then tracks the
  /// Sigma-weighted error instead of the plain l2 error.
  bool weighted_metric = false;
};

/// Seed of cell (noise k, fraction j, trial t):
/// derive_seed(root, (k * |fractions| + j) * trials + t).
std::uint64_t cell_seed(const SweepConfig& cfg, std::size_t noise_idx, std::size_t fraction_idx, int trial);

/// One dataset and one fit per (noise, fraction, trial). For the linear
/// estimators the errors are ||t_hat - t*||_2, ||t_hat - t*||_1 and
/// ||Sigma^{1/2}(t_hat - t*)||_2. For the RKHS estimator the target is
/// f* = sum_k c_k K(x_k, .) over the first min(10, n) training points and the
/// errors are the root mean square and mean absolute deviation on the training
/// points, and ||f_hat - f*||_H. Solver non-convergence is recorded, not thrown.
SweepResult sweep_outliers(const SweepConfig& cfg);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// 1 when the response has zero variance.
  double r2 = 0.0;
  int points = 0;
};

/// Ordinary least squares of y on x; nullopt for fewer than two points or a
/// constant x.
std::optional<LinearFit> fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Spearman rank correlation with average ranks for ties; 0 when either
/// variable is constant.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

struct SummaryPoint {
  std::string noise;
  double fraction = 0.0;
  int trials = 0;
  int converged = 0;
  double mean_l2 = 0.0;
  double se_l2 = 0.0;
  double mean_l1 = 0.0;
  double se_l1 = 0.0;
  double mean_weighted = 0.0;
  double se_weighted = 0.0;

  /// The plotted metric: weighted error when `weighted`, else l2.
  double mean(bool weighted) const { return weighted ? mean_weighted : mean_l2; }
  double se(bool weighted) const { return weighted ? se_weighted : se_l2; }
};

struct NoiseSummary {
  std::string noise;
  /// Fit of mean error against fraction over fractions >= min_fraction.
  std::optional<LinearFit> fit;
  /// Over all fractions.
  double spearman = 0.0;
};

struct SweepSummary {
  std::vector<SummaryPoint> points;
  std::vector<NoiseSummary> per_noise;
  bool weighted_metric = false;
  double min_fraction = 0.0;
};

/// Mean and standard error (sample standard deviation / sqrt(trials)) per
/// (noise, fraction) cell, plus per-noise fits. Throws on an empty result.
SweepSummary summarize(const SweepResult& result, double min_fraction = 0.0);

/// N=1000, p=50, identity design, Huber ERM, gamma=1, Gaussian(1), Student-t(2)
/// and Cauchy(1) noise, fractions 0, 0.05, ..., 0.4, 20 trials.
SweepConfig fig1_config();

/// N=1000, p=1000, s=50, l1-penalized Huber with lambda=1e-3, same noises and
/// fractions, 10 trials. Solved by the interior-point method (tol 1e-7):
/// proximal gradient needs more than 1e5 iterations per fit at this size.
SweepConfig fig2_config();

}  // namespace huberbench
