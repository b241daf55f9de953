#include "huberbench/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "huberbench/parallel.hpp"
#include "huberbench/rng.hpp"

namespace huberbench {

namespace {

constexpr long kBlockSize = 256;

// sup over {||t||_2 <= r, ||t||_1 <= rho} of <t, v>.
double intersection_support(const VectorXd& v, double r, double rho) {
  if (r <= 0.0 || rho <= 0.0) return 0.0;
  std::vector<double> a(v.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) a[j] = std::abs(v[j]);
  std::sort(a.begin(), a.end(), std::greater<>());
  if (a.empty() || a[0] == 0.0) return 0.0;

  double l1 = 0.0, l2sq = 0.0;
  for (double x : a) {
    l1 += x;
    l2sq += x * x;
  }
  const double l2 = std::sqrt(l2sq);
  // Same expressions as the single-ball support functions, so the result never
  // exceeds either of them, not even by rounding.
  const double l2_value = r * v.norm();
  const double l1_value = rho * v.cwiseAbs().maxCoeff();
  // rho B_1 sits inside r B_2.
  if (rho <= r) return l1_value;
  const double target = rho / r;  // ratio ||S||_1 / ||S||_2 at the optimum, in (1, ...)
  if (l1 / l2 <= target) return l2_value;

  // With k active coordinates and threshold theta in [a_k, a_{k-1}]:
  //   ||S||_1 = P1 - k theta,  ||S||_2^2 = P2 - 2 theta P1 + k theta^2.
  // The ratio decreases in theta; find the segment that brackets `target`.
  const std::size_t p = a.size();
  double p1 = 0.0, p2 = 0.0;
  std::size_t k = 0;
  double lo_theta = 0.0, hi_theta = a[0];
  while (k < p) {
    p1 += a[k];
    p2 += a[k] * a[k];
    ++k;
    const double theta_low = k < p ? a[k] : 0.0;
    const double s1 = p1 - double(k) * theta_low;
    const double s2 = p2 - 2.0 * theta_low * p1 + double(k) * theta_low * theta_low;
    if (s2 > 0.0 && s1 / std::sqrt(s2) >= target) {
      lo_theta = theta_low;
      hi_theta = a[k - 1];
      break;
    }
  }
  const double kd = double(k);
  auto ratio = [&](double theta) {
    const double s1 = p1 - kd * theta;
    const double s2 = std::max(0.0, p2 - 2.0 * theta * p1 + kd * theta * theta);
    return s2 > 0.0 ? s1 / std::sqrt(s2) : 1.0;
  };
  // Keep hi_theta on the feasible side (ratio <= target).
  for (int it = 0; it < 200 && hi_theta - lo_theta > 1e-13 * a[0]; ++it) {
    const double mid = 0.5 * (lo_theta + hi_theta);
    if (ratio(mid) > target) {
      lo_theta = mid;
    } else {
      hi_theta = mid;
    }
  }
  const double theta = hi_theta;
  const double s2 = std::max(0.0, p2 - 2.0 * theta * p1 + kd * theta * theta);
  if (s2 <= 0.0) return std::min(l2_value, l1_value);
  // <S_theta(a), a> = P2 - theta P1 over the active set.
  const double value = r * (p2 - theta * p1) / std::sqrt(s2);
  return std::min({value, l2_value, l1_value});
}

void validate_set(const SetSpec& set, Eigen::Index dim) {
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, BallIntersection>) {
          if (!(s.r >= 0.0) || !(s.rho >= 0.0)) throw std::invalid_argument("set spec: radii must be >= 0");
        } else {
          if (!(s.radius >= 0.0)) throw std::invalid_argument("set spec: radius must be >= 0");
        }
        if constexpr (std::is_same_v<S, EllipsoidImage>) {
          if (s.sqrt_sigma.rows() != dim || s.sqrt_sigma.cols() != dim) {
            throw std::invalid_argument("set spec: ellipsoid factor does not match dimension");
          }
        }
      },
      set);
}

McEstimate summarize_draws(const std::vector<double>& values) {
  McEstimate est;
  est.samples = static_cast<long>(values.size());
  double sum = 0.0;
  for (double x : values) sum += x;
  est.estimate = sum / double(values.size());
  double ss = 0.0;
  for (double x : values) ss += (x - est.estimate) * (x - est.estimate);
  const double var = values.size() > 1 ? ss / double(values.size() - 1) : 0.0;
  est.std_error = std::sqrt(var / double(values.size()));
  return est;
}

}  // namespace

double support_function(const SetSpec& set, const VectorXd& v) {
  validate_set(set, v.size());
  return std::visit(
      [&](const auto& s) -> double {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, L2Ball>) {
          return s.radius * v.norm();
        } else if constexpr (std::is_same_v<S, L1Ball>) {
          return v.size() == 0 ? 0.0 : s.radius * v.cwiseAbs().maxCoeff();
        } else if constexpr (std::is_same_v<S, BallIntersection>) {
          return intersection_support(v, s.r, s.rho);
        } else {
          // sup over u in B_1 of <S u, v> = ||S^T v||_inf.
          return v.size() == 0 ? 0.0 : s.radius * (s.sqrt_sigma.transpose() * v).cwiseAbs().maxCoeff();
        }
      },
      set);
}

McEstimate gaussian_mean_width_mc(const SetSpec& set, int dim, long samples, std::uint64_t seed,
                                  unsigned threads) {
  if (dim < 1) throw std::invalid_argument("gaussian_mean_width_mc: dim must be >= 1");
  if (samples < 100) throw std::invalid_argument("gaussian_mean_width_mc: need at least 100 samples");
  validate_set(set, dim);
  std::vector<double> values(samples);
  const long blocks = (samples + kBlockSize - 1) / kBlockSize;
  parallel_for(static_cast<std::size_t>(blocks), threads, [&](std::size_t b) {
    Rng rng(derive_seed(seed, b));
    std::normal_distribution<double> normal;
    VectorXd g(dim);
    const long end = std::min<long>(samples, (long(b) + 1) * kBlockSize);
    for (long i = long(b) * kBlockSize; i < end; ++i) {
      for (int j = 0; j < dim; ++j) g[j] = normal(rng);
      values[i] = support_function(set, g);
    }
  });
  return summarize_draws(values);
}

McEstimate rademacher_mc(const GaussianDesignSpec& design, const SetSpec& set, int n, long samples,
                         std::uint64_t seed, unsigned threads) {
  if (n < 1) throw std::invalid_argument("rademacher_mc: n must be >= 1");
  if (samples < 100) throw std::invalid_argument("rademacher_mc: need at least 100 samples");
  const int dim = design.dim();
  validate_set(set, dim);
  std::vector<double> values(samples);
  const long blocks = (samples + kBlockSize - 1) / kBlockSize;
  parallel_for(static_cast<std::size_t>(blocks), threads, [&](std::size_t b) {
    Rng rng(derive_seed(seed, b));
    std::normal_distribution<double> normal;
    std::bernoulli_distribution coin(0.5);
    VectorXd z(dim);
    VectorXd acc(dim);
    const long end = std::min<long>(samples, (long(b) + 1) * kBlockSize);
    for (long i = long(b) * kBlockSize; i < end; ++i) {
      acc.setZero();
      for (int row = 0; row < n; ++row) {
        for (int j = 0; j < dim; ++j) z[j] = normal(rng);
        const double sign = coin(rng) ? 1.0 : -1.0;
        if (design.is_identity()) {
          acc += sign * z;
        } else {
          acc += sign * (design.factor() * z);
        }
      }
      values[i] = support_function(set, acc);
    }
  });
  return summarize_draws(values);
}

double fixed_point_radius(const std::function<double(double)>& complexity, double a, double lipschitz, long n,
                          ComplexityMode mode, double c_abs) {
  if (!(a > 0.0) || !(lipschitz > 0.0) || n < 1 || !(c_abs > 0.0)) {
    throw std::invalid_argument("fixed_point_radius: A, L, n and c must be positive");
  }
  const double scale = c_abs * (mode == ComplexityMode::SubGaussian ? std::sqrt(double(n)) : double(n));
  auto holds = [&](double r) { return a * lipschitz * complexity(r) <= scale * r * r; };

  double lo = 0.0;
  double hi = 1.0;
  if (holds(hi)) {
    // Walk down until the inequality fails; if it never does the infimum is 0.
    lo = hi;
    int steps = 0;
    while (holds(lo)) {
      hi = lo;
      lo *= 0.5;
      if (++steps > 1100 || lo == 0.0) return 0.0;
    }
  } else {
    lo = hi;
    int steps = 0;
    while (!holds(hi)) {
      lo = hi;
      hi *= 2.0;
      if (++steps > 1100 || !std::isfinite(hi)) {
        std::ostringstream msg;
        msg << "fixed_point_radius: inequality never satisfied on [1, " << lo << "]; last complexity value "
            << complexity(lo);
        throw std::runtime_error(msg.str());
      }
    }
  }
  while (hi - lo > 1e-6 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (holds(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace huberbench
