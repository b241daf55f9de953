#include "huberbench/data.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include <boost/math/special_functions/beta.hpp>

#include "huberbench/rng.hpp"

namespace huberbench {

namespace {

MatrixXd validated_symmetric(const MatrixXd& sigma) {
  if (sigma.rows() != sigma.cols() || sigma.rows() == 0) {
    throw std::invalid_argument("covariance must be a non-empty square matrix");
  }
  if (!sigma.allFinite()) throw std::invalid_argument("covariance has non-finite entries");
  const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("covariance is not symmetric");
  }
  return 0.5 * (sigma + sigma.transpose());
}

}  // namespace

GaussianDesignSpec::GaussianDesignSpec(MatrixXd sigma, bool identity, std::string label)
    : covariance_(std::move(sigma)), identity_(identity), label_(std::move(label)) {
  trace_ = covariance_.trace();
  const int p = dim();
  if (identity_) {
    factor_ = MatrixXd::Identity(p, p);
    sqrt_covariance_ = factor_;
    return;
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(covariance_);
  const VectorXd& ev = eig.eigenvalues();
  const double tol = 1e-10 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  if (ev.minCoeff() < -tol) {
    std::ostringstream msg;
    msg << "covariance is not positive semidefinite (min eigenvalue " << ev.minCoeff() << ")";
    throw std::invalid_argument(msg.str());
  }
  const VectorXd root = ev.cwiseMax(0.0).cwiseSqrt();
  factor_ = eig.eigenvectors() * root.asDiagonal();
  sqrt_covariance_ = factor_ * eig.eigenvectors().transpose();
}

GaussianDesignSpec GaussianDesignSpec::identity(int dim) {
  if (dim <= 0) throw std::invalid_argument("design dimension must be positive");
  return GaussianDesignSpec(MatrixXd::Identity(dim, dim), true, "identity");
}

GaussianDesignSpec GaussianDesignSpec::diagonal(const VectorXd& variances) {
  if (variances.size() == 0) throw std::invalid_argument("design dimension must be positive");
  if ((variances.array() < 0.0).any()) {
    throw std::invalid_argument("diagonal covariance has negative variance");
  }
  return GaussianDesignSpec(variances.asDiagonal().toDenseMatrix(), false, "diagonal");
}

GaussianDesignSpec GaussianDesignSpec::toeplitz(int dim, double rho) {
  if (dim <= 0) throw std::invalid_argument("design dimension must be positive");
  if (!(std::abs(rho) < 1.0)) throw std::invalid_argument("toeplitz rho must lie in (-1, 1)");
  MatrixXd sigma(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) sigma(i, j) = std::pow(rho, std::abs(i - j));
  std::ostringstream label;
  label << "toeplitz(" << rho << ")";
  return GaussianDesignSpec(std::move(sigma), false, label.str());
}

GaussianDesignSpec GaussianDesignSpec::from_covariance(const MatrixXd& sigma) {
  return GaussianDesignSpec(validated_symmetric(sigma), false, "custom");
}

std::string GaussianDesignSpec::describe() const {
  std::ostringstream out;
  out << label_ << " p=" << dim() << " trace=" << trace_;
  return out.str();
}

NoiseModel NoiseModel::gaussian(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("gaussian noise: sigma must be positive");
  return NoiseModel(Kind::Gaussian, sigma);
}

NoiseModel NoiseModel::student_t(double df) {
  if (!(df > 0.0) || !std::isfinite(df)) throw std::invalid_argument("student-t noise: df must be positive");
  return NoiseModel(Kind::StudentT, df);
}

NoiseModel NoiseModel::cauchy(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw std::invalid_argument("cauchy noise: scale must be positive");
  return NoiseModel(Kind::Cauchy, scale);
}

NoiseModel NoiseModel::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw std::invalid_argument("noise model '" + std::string(text) + "' must look like kind:parameter");
  }
  const std::string kind(text.substr(0, colon));
  const std::string value(text.substr(colon + 1));
  double param = 0.0;
  try {
    std::size_t used = 0;
    param = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
  } catch (const std::exception&) {
    throw std::invalid_argument("noise model '" + std::string(text) + "': bad parameter");
  }
  if (kind == "gaussian") return gaussian(param);
  if (kind == "student_t") return student_t(param);
  if (kind == "cauchy") return cauchy(param);
  throw std::invalid_argument("unknown noise kind '" + kind + "'");
}

double NoiseModel::central_mass(double a) const {
  if (std::isnan(a)) throw std::invalid_argument("central_mass: NaN argument");
  const double sign = a < 0.0 ? -1.0 : 1.0;
  const double x = std::abs(a);
  if (std::isinf(x)) return sign;
  double mass = 0.0;
  switch (kind_) {
    case Kind::Gaussian:
      mass = std::erf(x / (param_ * std::numbers::sqrt2));
      break;
    case Kind::Cauchy:
      mass = 2.0 * std::atan(x / param_) / std::numbers::pi;
      break;
    case Kind::StudentT:
      if (param_ == 2.0) {
        mass = x / std::sqrt(2.0 + x * x);
      } else {
        // P(|T| <= x) = 1 - I_{df/(df+x^2)}(df/2, 1/2)
        mass = boost::math::ibetac(param_ / 2.0, 0.5, param_ / (param_ + x * x));
      }
      break;
  }
  return sign * mass;
}

double NoiseModel::cdf(double t) const {
  if (std::isnan(t)) throw std::invalid_argument("cdf: NaN argument");
  // Symmetric about zero: F(t) = 1/2 + (F(t) - F(-t)) / 2.
  return 0.5 + 0.5 * central_mass(t);
}

std::string NoiseModel::name() const {
  std::ostringstream out;
  out.precision(17);
  switch (kind_) {
    case Kind::Gaussian: out << "gaussian:"; break;
    case Kind::StudentT: out << "student_t:"; break;
    case Kind::Cauchy: out << "cauchy:"; break;
  }
  out << param_;
  return out.str();
}

GroundTruth::GroundTruth(VectorXd coefficients) : coefficients_(std::move(coefficients)) {
  sparsity_ = static_cast<int>((coefficients_.array() != 0.0).count());
}

GroundTruth random_sparse_truth(int dim, int sparsity, std::uint64_t seed) {
  if (dim <= 0 || sparsity < 0 || sparsity > dim) {
    throw std::invalid_argument("random_sparse_truth: need 0 <= sparsity <= dim");
  }
  Rng rng(seed);
  std::vector<int> idx(dim);
  for (int j = 0; j < dim; ++j) idx[j] = j;
  for (int k = 0; k < sparsity; ++k) {
    std::uniform_int_distribution<int> pick(k, dim - 1);
    std::swap(idx[k], idx[pick(rng)]);
  }
  std::normal_distribution<double> normal;
  VectorXd t = VectorXd::Zero(dim);
  for (int k = 0; k < sparsity; ++k) {
    double v = 0.0;
    while (v == 0.0) v = normal(rng);
    t[idx[k]] = v;
  }
  return GroundTruth(std::move(t));
}

MatrixXd generate_design(const GaussianDesignSpec& spec, int n, std::uint64_t seed) {
  if (n < 0) throw std::invalid_argument("generate_design: negative sample count");
  const int p = spec.dim();
  Rng rng(seed);
  std::normal_distribution<double> normal;
  MatrixXd z(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) z(i, j) = normal(rng);
  if (spec.is_identity()) return z;
  return z * spec.factor().transpose();
}

VectorXd sample_noise(const NoiseModel& model, int n, std::uint64_t seed) {
  if (n < 0) throw std::invalid_argument("sample_noise: negative sample count");
  Rng rng(seed);
  VectorXd eps(n);
  switch (model.kind()) {
    case NoiseModel::Kind::Gaussian: {
      std::normal_distribution<double> normal(0.0, model.parameter());
      for (int i = 0; i < n; ++i) eps[i] = normal(rng);
      break;
    }
    case NoiseModel::Kind::Cauchy: {
      std::cauchy_distribution<double> cauchy(0.0, model.parameter());
      for (int i = 0; i < n; ++i) eps[i] = cauchy(rng);
      break;
    }
    case NoiseModel::Kind::StudentT: {
      // Z / sqrt(V / df) with Z standard normal and V chi-square(df).
      std::normal_distribution<double> normal;
      std::chi_squared_distribution<double> chi2(model.parameter());
      for (int i = 0; i < n; ++i) {
        const double z = normal(rng);
        const double v = chi2(rng);
        eps[i] = z / std::sqrt(v / model.parameter());
      }
      break;
    }
  }
  return eps;
}

InjectionResult inject_outliers(const VectorXd& labels, const ContaminationSpec& spec) {
  const int n = static_cast<int>(labels.size());
  if (spec.count < 0 || spec.count > n) {
    throw std::invalid_argument("inject_outliers: count must lie in [0, N]");
  }
  Rng rng(spec.seed);
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  for (int k = 0; k < spec.count; ++k) {
    std::uniform_int_distribution<int> pick(k, n - 1);
    std::swap(idx[k], idx[pick(rng)]);
  }
  InjectionResult out{labels, std::vector<int>(idx.begin(), idx.begin() + spec.count)};
  std::sort(out.outlier_idx.begin(), out.outlier_idx.end());

  std::visit(
      [&](const auto& gen) {
        using G = std::decay_t<decltype(gen)>;
        if constexpr (std::is_same_v<G, UniformRange>) {
          if (!(gen.lo <= gen.hi)) throw std::invalid_argument("uniform outlier range has lo > hi");
          std::uniform_real_distribution<double> unif(gen.lo, gen.hi);
          for (int i : out.outlier_idx) out.labels[i] = unif(rng);
        } else if constexpr (std::is_same_v<G, ConstantShift>) {
          for (int i : out.outlier_idx) out.labels[i] = labels[i] + gen.shift;
        } else {
          for (int i : out.outlier_idx) out.labels[i] = -10.0 * labels[i];
        }
      },
      spec.generator);
  return out;
}

ContaminatedDataset make_regression_dataset(const GaussianDesignSpec& design_spec,
                                            const GroundTruth& truth,
                                            const NoiseModel& noise,
                                            const ContaminationSpec& contamination, int n,
                                            std::uint64_t seed) {
  if (truth.coefficients().size() != design_spec.dim()) {
    throw std::invalid_argument("make_regression_dataset: truth length does not match design dimension");
  }
  ContaminatedDataset data;
  data.design = generate_design(design_spec, n, derive_seed(seed, 0));
  const VectorXd clean = data.design * truth.coefficients() + sample_noise(noise, n, derive_seed(seed, 1));
  InjectionResult injected = inject_outliers(clean, contamination);
  data.labels = std::move(injected.labels);
  data.outlier_idx = std::move(injected.outlier_idx);
  data.informative_idx.reserve(n - data.outlier_idx.size());
  std::size_t k = 0;
  for (int i = 0; i < n; ++i) {
    if (k < data.outlier_idx.size() && data.outlier_idx[k] == i) {
      ++k;
    } else {
      data.informative_idx.push_back(i);
    }
  }
  data.truth = truth;
  return data;
}

}  // namespace huberbench
