#include "huberbench/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "huberbench/rng.hpp"

namespace huberbench {

BernsteinCheck bernstein_check(const NoiseModel& noise, double gamma, double r, double alpha, double multiplier) {
  if (!std::isfinite(gamma) || !std::isfinite(r) || !std::isfinite(alpha) || !std::isfinite(multiplier)) {
    throw std::invalid_argument("bernstein_check: non-finite input");
  }
  if (r < 0.0) throw std::invalid_argument("bernstein_check: r must be >= 0");
  // F(a) - F(-a) for a = gamma - m r; negative (or zero) when m r >= gamma.
  const double mass = noise.central_mass(gamma - multiplier * r);
  BernsteinCheck out;
  out.margin = mass - alpha;
  out.holds = out.margin >= 0.0;
  return out;
}

SparsityCheck sparsity_equation_check(long s, double rho, double r, double kappa) {
  if (!(r > 0.0)) throw std::invalid_argument("sparsity_equation_check: r must be positive");
  if (s < 0) throw std::invalid_argument("sparsity_equation_check: s must be >= 0");
  const double q = kappa * rho / r;
  SparsityCheck out;
  out.max_sparsity = q * q / 100.0;
  out.holds = 100.0 * double(s) <= q * q;
  return out;
}

double re_ratio(const MatrixXd& sigma, const VectorXd& v, const std::vector<int>& support) {
  double on_support = 0.0;
  for (int j : support) on_support += v[j] * v[j];
  if (on_support <= 0.0) return std::numeric_limits<double>::infinity();
  const double quad = std::max(0.0, v.dot(sigma * v));
  return std::sqrt(quad / on_support);
}

namespace {

// ||v_{J^c}||_1 <= c0 ||v_J||_1.
bool in_cone(const VectorXd& v, const std::vector<char>& in_support, double c0) {
  double on = 0.0, off = 0.0;
  for (Eigen::Index j = 0; j < v.size(); ++j) (in_support[j] ? on : off) += std::abs(v[j]);
  return off <= c0 * on * (1.0 + 1e-12);
}

void retract_to_cone(VectorXd& v, const std::vector<char>& in_support, double c0) {
  double on = 0.0, off = 0.0;
  for (Eigen::Index j = 0; j < v.size(); ++j) (in_support[j] ? on : off) += std::abs(v[j]);
  if (off <= c0 * on || off == 0.0) return;
  const double scale = c0 * on / off;
  for (Eigen::Index j = 0; j < v.size(); ++j)
    if (!in_support[j]) v[j] *= scale;
}

struct Candidate {
  double ratio = std::numeric_limits<double>::infinity();
  VectorXd v;
  std::vector<int> support;
};

Candidate refine(const MatrixXd& sigma, Candidate c, double c0) {
  const Eigen::Index p = c.v.size();
  std::vector<char> in_support(p, 0);
  for (int j : c.support) in_support[j] = 1;
  double step = 0.1;
  double best = c.ratio * c.ratio;
  for (int it = 0; it < 300 && step > 1e-12; ++it) {
    double on = 0.0;
    for (int j : c.support) on += c.v[j] * c.v[j];
    VectorXd proj = VectorXd::Zero(p);
    for (int j : c.support) proj[j] = c.v[j];
    const VectorXd grad = 2.0 * (sigma * c.v - best * proj) / on;
    VectorXd trial = c.v - step * grad;
    retract_to_cone(trial, in_support, c0);
    const double r = re_ratio(sigma, trial, c.support);
    if (r * r < best) {
      double norm = 0.0;
      for (int j : c.support) norm += trial[j] * trial[j];
      c.v = trial / std::sqrt(norm);
      best = r * r;
      step *= 1.5;
    } else {
      step *= 0.5;
    }
  }
  c.ratio = re_ratio(sigma, c.v, c.support);
  return c;
}

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

ReEstimate re_constant_estimate(const MatrixXd& sigma, int s, double c0, int n_samples, std::uint64_t seed) {
  const int p = static_cast<int>(sigma.rows());
  if (sigma.cols() != p || p == 0) throw std::invalid_argument("re_constant_estimate: sigma must be square");
  if (s < 1 || s > p) throw std::invalid_argument("re_constant_estimate: need 1 <= s <= p");
  if (!(c0 >= 0.0)) throw std::invalid_argument("re_constant_estimate: c0 must be >= 0");
  if (n_samples < 0) throw std::invalid_argument("re_constant_estimate: n_samples must be >= 0");

  constexpr long kMaxSupports = 5000;
  Rng rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);

  // Supports of size exactly s suffice: enlarging J both enlarges its cone
  // and shrinks the ratio.
  std::vector<std::vector<int>> supports;
  ReEstimate out;
  if (log_binomial(p, s) <= std::log(double(kMaxSupports))) {
    std::vector<int> comb(s);
    for (int i = 0; i < s; ++i) comb[i] = i;
    while (true) {
      supports.push_back(comb);
      int i = s - 1;
      while (i >= 0 && comb[i] == p - s + i) --i;
      if (i < 0) break;
      ++comb[i];
      for (int j = i + 1; j < s; ++j) comb[j] = comb[j - 1] + 1;
    }
  } else {
    out.sampled_supports = true;
    std::vector<int> idx(p);
    for (int j = 0; j < p; ++j) idx[j] = j;
    for (long k = 0; k < kMaxSupports; ++k) {
      for (int i = 0; i < s; ++i) {
        std::uniform_int_distribution<int> pick(i, p - 1);
        std::swap(idx[i], idx[pick(rng)]);
      }
      std::vector<int> J(idx.begin(), idx.begin() + s);
      std::sort(J.begin(), J.end());
      supports.push_back(std::move(J));
    }
  }
  out.supports_examined = static_cast<long>(supports.size());

  std::vector<Candidate> best_per_support;
  best_per_support.reserve(supports.size());
  std::vector<char> in_support(p, 0);
  for (const auto& J : supports) {
    std::fill(in_support.begin(), in_support.end(), 0);
    for (int j : J) in_support[j] = 1;
    Candidate best;
    best.support = J;
    for (int j : J) {
      VectorXd e = VectorXd::Zero(p);
      e[j] = 1.0;
      const double r = re_ratio(sigma, e, J);
      if (r < best.ratio) {
        best.ratio = r;
        best.v = e;
      }
    }
    for (int k = 0; k < n_samples; ++k) {
      VectorXd v = VectorXd::Zero(p);
      double on_l1 = 0.0;
      for (int j : J) {
        v[j] = normal(rng);
        on_l1 += std::abs(v[j]);
      }
      double off_l1 = 0.0;
      for (int j = 0; j < p; ++j) {
        if (in_support[j]) continue;
        v[j] = (unif(rng) < 0.5 ? -1.0 : 1.0) * expo(rng);
        off_l1 += std::abs(v[j]);
      }
      if (off_l1 > 0.0) {
        const double target = unif(rng) * c0 * on_l1;
        for (int j = 0; j < p; ++j)
          if (!in_support[j]) v[j] *= target / off_l1;
      }
      if (!in_cone(v, in_support, c0)) continue;
      const double r = re_ratio(sigma, v, J);
      if (r < best.ratio) {
        best.ratio = r;
        best.v = v;
      }
    }
    best_per_support.push_back(std::move(best));
  }

  constexpr std::size_t kRefine = 5;
  const std::size_t keep = std::min(kRefine, best_per_support.size());
  std::partial_sort(best_per_support.begin(), best_per_support.begin() + keep, best_per_support.end(),
                    [](const Candidate& a, const Candidate& b) { return a.ratio < b.ratio; });
  Candidate winner = best_per_support.front();
  for (std::size_t k = 0; k < keep; ++k) {
    Candidate refined = refine(sigma, best_per_support[k], c0);
    if (refined.ratio < winner.ratio) winner = std::move(refined);
  }
  out.kappa_hat = re_ratio(sigma, winner.v, winner.support);
  out.witness = winner.v;
  out.witness_support = winner.support;
  return out;
}

double non_isotropic_width_bound(int dim, double r, double rho) {
  if (dim < 1 || !(r > 0.0) || !(rho > 0.0)) throw std::invalid_argument("non_isotropic_width_bound: bad input");
  const double q = std::min((r / rho) * (r / rho), 1.0);
  const double arg = 8.0 * std::numbers::e * double(dim) * q;
  const double log_plus = std::max(1.0, std::log(arg));
  return 4.0 * rho * std::sqrt(log_plus);
}

}  // namespace huberbench
