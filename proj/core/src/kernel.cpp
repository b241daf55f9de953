#include "huberbench/kernel.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace huberbench {

Kernel::Kernel(Kind kind) : kind_(kind) {
  std::visit(
      [](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, GaussianRbf>) {
          if (!(k.bandwidth > 0.0)) throw std::invalid_argument("rbf kernel: bandwidth must be positive");
        } else {
          if (k.degree < 1) throw std::invalid_argument("polynomial kernel: degree must be >= 1");
          if (!(k.offset >= 0.0)) throw std::invalid_argument("polynomial kernel: offset must be >= 0");
        }
      },
      kind_);
}

double Kernel::operator()(const Eigen::Ref<const VectorXd>& x, const Eigen::Ref<const VectorXd>& y) const {
  if (x.size() != y.size()) throw std::invalid_argument("kernel: point dimension mismatch");
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, GaussianRbf>) {
          return std::exp(-(x - y).squaredNorm() / (2.0 * k.bandwidth * k.bandwidth));
        } else {
          return std::pow((x.dot(y) + k.offset) / (1.0 + k.offset), k.degree);
        }
      },
      kind_);
}

MatrixXd Kernel::cross(const MatrixXd& a, const MatrixXd& b) const {
  if (a.cols() != b.cols()) throw std::invalid_argument("kernel: point dimension mismatch");
  MatrixXd out(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.rows(); ++j) out(i, j) = (*this)(a.row(i).transpose(), b.row(j).transpose());
  return out;
}

VectorXd GramFactorization::apply_inverse_sqrt(const VectorXd& v) const {
  VectorXd coeff = eigenvectors.transpose() * v;
  for (Eigen::Index k = 0; k < coeff.size(); ++k) {
    coeff[k] = eigenvalues[k] > kGramEigenFloor ? coeff[k] / std::sqrt(eigenvalues[k]) : 0.0;
  }
  return eigenvectors * coeff;
}

GramFactorization gram_matrix(const Kernel& kernel, const MatrixXd& points) {
  if (points.rows() < 1) throw std::invalid_argument("gram_matrix: need at least one point");
  if (!points.allFinite()) throw std::invalid_argument("gram_matrix: non-finite point coordinates");
  GramFactorization fac;
  const Eigen::Index n = points.rows();
  fac.gram.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = kernel(points.row(i).transpose(), points.row(j).transpose());
      fac.gram(i, j) = v;
      fac.gram(j, i) = v;
    }
  }
  if (!fac.gram.allFinite()) throw std::invalid_argument("gram_matrix: kernel produced non-finite entries");

  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(fac.gram);
  // Eigen returns ascending order.
  fac.eigenvalues = eig.eigenvalues().reverse();
  fac.eigenvectors = eig.eigenvectors().rowwise().reverse();
  fac.min_eigenvalue = fac.eigenvalues[n - 1];
  fac.indefinite = fac.min_eigenvalue < -1e-8;
  VectorXd root(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    root[k] = fac.eigenvalues[k] > kGramEigenFloor ? std::sqrt(fac.eigenvalues[k]) : 0.0;
  }
  fac.sqrt_factor = fac.eigenvectors * root.asDiagonal() * fac.eigenvectors.transpose();
  return fac;
}

FitResult fit_rkhs_huber(const GramFactorization& gram, const VectorXd& labels, const HuberParams& params,
                         double lambda, const SolverConfig& cfg) {
  if (!(lambda > 0.0)) throw std::invalid_argument("fit_rkhs_huber: lambda must be positive");
  if (labels.size() != gram.gram.rows()) throw std::invalid_argument("fit_rkhs_huber: label count mismatch");
  FitResult fit =
      detail::minimize_huber_composite(gram.sqrt_factor, labels, params, detail::Penalty::GroupL2, lambda, cfg);
  fit.representer_weights = gram.apply_inverse_sqrt(fit.coefficients);
  return fit;
}

FitResult fit_rkhs_huber(const MatrixXd& points, const VectorXd& labels, const Kernel& kernel,
                         const HuberParams& params, double lambda, const SolverConfig& cfg) {
  return fit_rkhs_huber(gram_matrix(kernel, points), labels, params, lambda, cfg);
}

double rkhs_norm(const GramFactorization& gram, const VectorXd& alpha) {
  if (alpha.size() != gram.gram.rows()) throw std::invalid_argument("rkhs_norm: length mismatch");
  return std::sqrt(std::max(0.0, alpha.dot(gram.gram * alpha)));
}

VectorXd predict(const FitResult& fit, const Kernel& kernel, const MatrixXd& train_points,
                 const MatrixXd& query_points) {
  if (!fit.representer_weights) throw std::invalid_argument("predict: fit carries no representer weights");
  const VectorXd& alpha = *fit.representer_weights;
  if (alpha.size() != train_points.rows()) throw std::invalid_argument("predict: weight/training point mismatch");
  if (query_points.cols() != train_points.cols()) throw std::invalid_argument("predict: point dimension mismatch");
  return kernel.cross(query_points, train_points) * alpha;
}

SpectrumFit estimate_spectrum_decay(std::span<const double> eigenvalues, SpectrumRange range) {
  if (range.k_min < 1) throw std::invalid_argument("spectrum fit: k_min must be >= 1");
  const int n = static_cast<int>(eigenvalues.size());
  const int k_max = range.k_max > 0 ? std::min(range.k_max, n) : n;
  const double top = n > 0 ? eigenvalues[0] : 0.0;
  std::vector<double> lx;
  std::vector<double> ly;
  for (int k = range.k_min; k <= k_max; ++k) {
    const double ev = eigenvalues[k - 1];
    if (!(ev > 1e-14 * top) || !(ev > 0.0)) continue;
    lx.push_back(std::log(double(k)));
    ly.push_back(std::log(ev));
  }
  const int m = static_cast<int>(lx.size());
  if (m < 5) throw std::invalid_argument("spectrum fit: fewer than 5 usable eigenvalues");

  double mx = 0.0, my = 0.0;
  for (int i = 0; i < m; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < m; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  SpectrumFit fit;
  fit.points_used = m;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (int i = 0; i < m; ++i) {
    const double e = ly[i] - (fit.intercept + fit.slope * lx[i]);
    sse += e * e;
  }
  fit.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  fit.p_hat = fit.slope < 0.0 ? -1.0 / fit.slope : std::numeric_limits<double>::infinity();
  fit.in_assumption_range = fit.p_hat > 0.0 && fit.p_hat < 1.0;
  return fit;
}

SpectrumFit estimate_spectrum_decay(const GramFactorization& fac, int n_used, SpectrumRange range) {
  const Eigen::Index n = fac.eigenvalues.size();
  if (n_used < 1 || n_used > n) throw std::invalid_argument("spectrum fit: n_used out of range");
  const VectorXd scaled = fac.eigenvalues.head(n_used) / double(n);
  return estimate_spectrum_decay(std::span<const double>(scaled.data(), scaled.size()), range);
}

}  // namespace huberbench
