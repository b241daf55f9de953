#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "huberbench/data.hpp"

namespace huberbench {

struct BernsteinCheck {
  bool holds = false;
  /// F(gamma - m r) - F(m r - gamma) - alpha.
  double margin = 0.0;
};

/// Local Bernstein condition for the Huber loss: the noise must put mass at
/// least alpha on [-(gamma - m r), gamma - m r]. The default multiplier 18
/// corresponds to a Gaussian design.
BernsteinCheck bernstein_check(const NoiseModel& noise, double gamma, double r, double alpha,
                               double multiplier = 18.0);

struct SparsityCheck {
  bool holds = false;
  /// Largest s with 100 s <= (kappa rho / r)^2.
  double max_sparsity = 0.0;
};

/// 100 s <= (kappa rho / r)^2. kappa = 1 is the isotropic case.
SparsityCheck sparsity_equation_check(long s, double rho, double r, double kappa = 1.0);

struct ReEstimate {
  /// Smallest ||Sigma^{1/2} v|| / ||v_J|| found over the sampled cone. This
  /// is an upper bound on the true RE constant, never a certificate that the
  /// condition holds.
  double kappa_hat = 0.0;
  VectorXd witness;
  std::vector<int> witness_support;
  long supports_examined = 0;
  /// True when there were too many supports to enumerate and a random subset
  /// was used.
  bool sampled_supports = false;
};

/// ||Sigma^{1/2} v|| / ||v_J|| for the given support.
double re_ratio(const MatrixXd& sigma, const VectorXd& v, const std::vector<int>& support);

/// Searches the RE(s, c0) cones {||v_{J^c}||_1 <= c0 ||v_J||_1}, |J| = s, for
/// the smallest restricted eigenvalue ratio: coordinate directions, then
/// `n_samples` random cone directions per support, then projected-gradient
/// refinement of the best candidates.
ReEstimate re_constant_estimate(const MatrixXd& sigma, int s, double c0 = 9.0, int n_samples = 200,
                                std::uint64_t seed = 0);

/// Upper bound on the Gaussian width of r B_2 intersected with rho Sigma^{1/2} B_1
/// when every Sigma_ii <= 1: 4 rho sqrt(log_+(8 e p min((r/rho)^2, 1))),
/// with log_+(a) = max(1, log a).
double non_isotropic_width_bound(int dim, double r, double rho);

}  // namespace huberbench
