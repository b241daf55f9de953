#include "huberbench/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace huberbench {

void SolverConfig::validate() const {
  if (max_iter < 1) throw std::invalid_argument("SolverConfig: max_iter must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("SolverConfig: tol must be positive");
  if (const auto* bt = std::get_if<Backtracking>(&step_rule)) {
    if (!(bt->beta > 0.0 && bt->beta < 1.0)) {
      throw std::invalid_argument("SolverConfig: backtracking beta must lie in (0, 1)");
    }
  }
}

VectorXd soft_threshold(const VectorXd& v, double threshold) {
  if (!(threshold >= 0.0)) throw std::invalid_argument("soft_threshold: threshold must be >= 0");
  VectorXd out(v.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    const double mag = std::abs(v[j]) - threshold;
    out[j] = mag > 0.0 ? std::copysign(mag, v[j]) : 0.0;
  }
  return out;
}

double operator_norm_squared(const MatrixXd& a, int max_iter, double rel_tol) {
  if (a.size() == 0) return 0.0;
  // Deterministic, non-degenerate start vector.
  VectorXd v(a.cols());
  for (Eigen::Index j = 0; j < v.size(); ++j) v[j] = 1.0 + 0.5 * std::sin(1.0 + 3.0 * double(j));
  v.normalize();
  double estimate = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    VectorXd w = a.transpose() * (a * v);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    const double next = v.dot(w);
    v = w / norm;
    if (it > 0 && std::abs(next - estimate) <= rel_tol * next) return next;
    estimate = next;
  }
  return estimate;
}

namespace detail {

VectorXd group_shrink(const VectorXd& v, double threshold) {
  const double norm = v.norm();
  if (norm <= threshold) return VectorXd::Zero(v.size());
  return (1.0 - threshold / norm) * v;
}

namespace {

class HuberComposite {
 public:
  HuberComposite(const MatrixXd& a, const VectorXd& y, double gamma, Penalty penalty, double lambda)
      : a_(a), y_(y), gamma_(gamma), inv_n_(1.0 / double(a.rows())), penalty_(penalty), lambda_(lambda) {}

  double smooth(const VectorXd& pred) const {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < pred.size(); ++i) {
      const double r = std::abs(pred[i] - y_[i]);
      sum += r <= gamma_ ? 0.5 * r * r : gamma_ * r - 0.5 * gamma_ * gamma_;
    }
    return sum * inv_n_;
  }

  VectorXd gradient(const VectorXd& pred) const {
    const VectorXd psi = (pred - y_).cwiseMax(-gamma_).cwiseMin(gamma_);
    return inv_n_ * (a_.transpose() * psi);
  }

  double penalty(const VectorXd& x) const {
    switch (penalty_) {
      case Penalty::None: return 0.0;
      case Penalty::L1: return lambda_ * x.lpNorm<1>();
      case Penalty::GroupL2: return lambda_ * x.norm();
    }
    return 0.0;
  }

  VectorXd prox(const VectorXd& v, double tau) const {
    switch (penalty_) {
      case Penalty::None: return v;
      case Penalty::L1: return soft_threshold(v, tau * lambda_);
      case Penalty::GroupL2: return group_shrink(v, tau * lambda_);
    }
    return v;
  }

  const MatrixXd& a() const { return a_; }

 private:
  const MatrixXd& a_;
  const VectorXd& y_;
  double gamma_;
  double inv_n_;
  Penalty penalty_;
  double lambda_;
};

struct ProxStep {
  VectorXd z;
  VectorXd az;
  double gz = 0.0;
};

/// Forward-backward step from `x` (with predictions `ax`, smooth value `gx`
/// and gradient `grad`). Backtracking shrinks `tau` in place until the
/// quadratic upper bound holds.
ProxStep prox_step(const HuberComposite& f, const VectorXd& x, double gx, const VectorXd& grad,
                   double& tau, const std::optional<double>& beta) {
  for (int shrink = 0;; ++shrink) {
    ProxStep s;
    s.z = f.prox(x - tau * grad, tau);
    s.az = f.a() * s.z;
    s.gz = f.smooth(s.az);
    if (!beta || shrink >= 100) return s;
    const VectorXd d = s.z - x;
    const double bound = gx + grad.dot(d) + d.squaredNorm() / (2.0 * tau);
    if (s.gz <= bound + 1e-12 * std::max(1.0, std::abs(gx))) return s;
    tau *= *beta;
  }
}

double stationarity(const HuberComposite& f, const VectorXd& x, const VectorXd& ax, double tau) {
  const VectorXd grad = f.gradient(ax);
  return (x - f.prox(x - tau * grad, tau)).norm() / tau;
}

}  // namespace

FitResult minimize_huber_composite(const MatrixXd& a, const VectorXd& y, const HuberParams& params,
                                   Penalty penalty, double lambda, const SolverConfig& cfg) {
  cfg.validate();
  if (a.rows() < 1) throw std::invalid_argument("solver: need at least one observation");
  if (y.size() != a.rows()) throw std::invalid_argument("solver: label count does not match design rows");
  if (!a.allFinite() || !y.allFinite()) throw std::invalid_argument("solver: non-finite data");
  if (!(lambda >= 0.0)) throw std::invalid_argument("solver: lambda must be >= 0");

  if (cfg.method == SolverMethod::InteriorPoint) {
    if (penalty != Penalty::L1) throw std::invalid_argument("solver: interior point supports the l1 penalty only");
    return minimize_huber_l1_ipm(a, y, params, lambda, cfg);
  }

  const HuberComposite f(a, y, params.gamma(), penalty, lambda);
  std::optional<double> beta;
  double tau = 1.0;
  if (const auto* bt = std::get_if<Backtracking>(&cfg.step_rule)) {
    beta = bt->beta;
  } else {
    // Huber curvature is at most 1, so the smooth gradient is L-Lipschitz
    // with L = ||A||_op^2 / N; the 5% margin covers power-iteration error.
    const double lip = 1.05 * operator_norm_squared(a) / double(a.rows());
    tau = lip > 0.0 ? 1.0 / lip : 1.0;
  }

  FitResult out;
  VectorXd x = VectorXd::Zero(a.cols());
  VectorXd ax = VectorXd::Zero(a.rows());
  double gx = f.smooth(ax);
  double fx = gx + f.penalty(x);
  out.objective_trace.reserve(std::min(cfg.max_iter, 100000) + 1);
  out.objective_trace.push_back(fx);

  bool converged = false;
  double residual = 0.0;

  if (!cfg.acceleration) {
    for (int k = 0; k < cfg.max_iter; ++k) {
      const VectorXd grad = f.gradient(ax);
      ProxStep s = prox_step(f, x, gx, grad, tau, beta);
      residual = (x - s.z).norm() / tau;
      if (residual <= cfg.tol) {
        converged = true;
        break;
      }
      x = std::move(s.z);
      ax = std::move(s.az);
      gx = s.gz;
      fx = gx + f.penalty(x);
      out.objective_trace.push_back(fx);
      ++out.iterations;
    }
    if (!converged) residual = stationarity(f, x, ax, tau);
  } else {
    constexpr int kCheckInterval = 5;
    VectorXd yk = x;
    VectorXd ayk = ax;
    double gy = gx;
    double t = 1.0;
    // True while yk == x; a step from x itself is a plain forward-backward
    // step and is accepted even if rounding hides its decrease.
    bool at_x = true;
    residual = stationarity(f, x, ax, tau);
    converged = residual <= cfg.tol;
    for (int k = 0; k < cfg.max_iter && !converged; ++k) {
      const VectorXd grad = f.gradient(ayk);
      ProxStep s = prox_step(f, yk, gy, grad, tau, beta);
      const double fz = s.gz + f.penalty(s.z);
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      if (fz <= fx || at_x) {
        const double momentum = (t - 1.0) / t_next;
        yk = s.z + momentum * (s.z - x);
        ayk = s.az + momentum * (s.az - ax);
        x = std::move(s.z);
        ax = std::move(s.az);
        gx = s.gz;
        fx = fz;
        t = t_next;
        at_x = momentum == 0.0;
      } else {
        // Restart: keep x, drop the momentum.
        yk = x;
        ayk = ax;
        t = 1.0;
        at_x = true;
      }
      gy = f.smooth(ayk);
      out.objective_trace.push_back(fx);
      ++out.iterations;
      if ((k + 1) % kCheckInterval == 0 || k + 1 == cfg.max_iter) {
        residual = stationarity(f, x, ax, tau);
        converged = residual <= cfg.tol;
      }
    }
  }

  out.coefficients = std::move(x);
  out.converged = converged;
  out.stationarity_residual = residual;
  return out;
}

}  // namespace detail

double objective_eval(const ContaminatedDataset& data, const HuberParams& params, double lambda,
                      const VectorXd& t) {
  if (t.size() != data.dim()) throw std::invalid_argument("objective_eval: coefficient length mismatch");
  if (data.n() < 1) throw std::invalid_argument("objective_eval: empty dataset");
  if (!(lambda >= 0.0)) throw std::invalid_argument("objective_eval: lambda must be >= 0");
  const VectorXd pred = data.design * t;
  double sum = 0.0;
  for (int i = 0; i < data.n(); ++i) sum += huber_value(pred[i], data.labels[i], params);
  return sum / double(data.n()) + lambda * t.lpNorm<1>();
}

FitResult fit_erm_huber(const ContaminatedDataset& data, const HuberParams& params, const SolverConfig& cfg) {
  FitResult fit = detail::minimize_huber_composite(data.design, data.labels, params, detail::Penalty::None,
                                                   0.0, cfg);
  // Rows in the quadratic zone carry the curvature; the minimizer is unique
  // only if they span R^p.
  const VectorXd resid = data.design * fit.coefficients - data.labels;
  std::vector<int> rows;
  for (int i = 0; i < data.n(); ++i)
    if (std::abs(resid[i]) <= params.gamma()) rows.push_back(i);
  if (static_cast<int>(rows.size()) < data.dim()) {
    fit.non_unique = true;
  } else {
    MatrixXd sub(rows.size(), data.dim());
    for (std::size_t k = 0; k < rows.size(); ++k) sub.row(k) = data.design.row(rows[k]);
    fit.non_unique = Eigen::ColPivHouseholderQR<MatrixXd>(sub).rank() < data.dim();
  }
  return fit;
}

FitResult fit_l1_huber(const ContaminatedDataset& data, const HuberParams& params, double lambda,
                       const SolverConfig& cfg) {
  if (!(lambda > 0.0)) throw std::invalid_argument("fit_l1_huber: lambda must be positive");
  return detail::minimize_huber_composite(data.design, data.labels, params, detail::Penalty::L1, lambda, cfg);
}

FitResult fit_ols(const ContaminatedDataset& data) {
  if (data.n() < 1) throw std::invalid_argument("fit_ols: empty dataset");
  FitResult fit;
  Eigen::ColPivHouseholderQR<MatrixXd> qr(data.design);
  fit.coefficients = qr.solve(data.labels);
  const VectorXd resid = data.design * fit.coefficients - data.labels;
  fit.objective_trace.push_back(0.5 * resid.squaredNorm() / double(data.n()));
  fit.stationarity_residual = (data.design.transpose() * resid).norm() / double(data.n());
  fit.converged = true;
  fit.non_unique = qr.rank() < data.dim();
  return fit;
}

ErrorNorms estimate_error(const FitResult& result, const GroundTruth& truth,
                          const GaussianDesignSpec& design_spec) {
  const VectorXd& t = result.coefficients;
  if (t.size() != truth.coefficients().size() || t.size() != design_spec.dim()) {
    throw std::invalid_argument("estimate_error: dimension mismatch");
  }
  const VectorXd d = t - truth.coefficients();
  ErrorNorms e;
  e.l2 = d.norm();
  e.l1 = d.lpNorm<1>();
  e.weighted = design_spec.is_identity() ? e.l2 : std::sqrt(std::max(0.0, d.dot(design_spec.covariance() * d)));
  return e;
}

}  // namespace huberbench
