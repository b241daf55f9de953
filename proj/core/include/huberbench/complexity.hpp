#pragma once

#include <cstdint>
#include <functional>
#include <variant>

#include <Eigen/Dense>

#include "huberbench/data.hpp"

namespace huberbench {

struct L2Ball {
  double radius = 1.0;
};
struct L1Ball {
  double radius = 1.0;
};
/// r B_2 intersected with rho B_1.
struct BallIntersection {
  double r = 1.0;
  double rho = 1.0;
};
/// radius * Sigma^{1/2} B_1, the convex hull of +-radius Sigma^{1/2} e_i.
struct EllipsoidImage {
  MatrixXd sqrt_sigma;
  double radius = 1.0;
};

using SetSpec = std::variant<L2Ball, L1Ball, BallIntersection, EllipsoidImage>;

/// sup_{t in set} <t, v>, solved exactly. For the ball intersection the
/// maximizer is a normalized soft-thresholding of v whose threshold is found
/// by locating the active count on the sorted magnitudes and bisecting inside
/// that segment.
double support_function(const SetSpec& set, const VectorXd& v);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  long samples = 0;
};

/// E sup_{t in set} <t, G>, G ~ N(0, I_dim). Draws are grouped in fixed blocks
/// seeded by derive_seed(seed, block), so the estimate does not depend on
/// `threads`.
McEstimate gaussian_mean_width_mc(const SetSpec& set, int dim, long samples, std::uint64_t seed,
                                  unsigned threads = 1);

/// E sup_{t in set} sum_{i<=n} sigma_i <t, X_i> with fresh Rademacher signs and
/// fresh design rows X_i ~ design for every sample.
McEstimate rademacher_mc(const GaussianDesignSpec& design, const SetSpec& set, int n, long samples,
                         std::uint64_t seed, unsigned threads = 1);

enum class ComplexityMode { SubGaussian, Bounded };

/// Smallest r > 0 with A L complexity(r) <= c sqrt(n) r^2 (SubGaussian, Gaussian
/// width) or A L complexity(r) <= c n r^2 (Bounded, Rademacher complexity).
/// `complexity` must be nondecreasing in r. Returns the infimum to relative
/// accuracy 1e-6; 0 when the inequality holds for every r > 0.
double fixed_point_radius(const std::function<double(double)>& complexity, double a, double lipschitz, long n,
                          ComplexityMode mode, double c_abs = 1.0);

}  // namespace huberbench
