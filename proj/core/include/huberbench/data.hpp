#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace huberbench {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Centered Gaussian design N(0, Sigma). The covariance is validated (symmetric,
/// PSD) and factored once at construction.
class GaussianDesignSpec {
 public:
  static GaussianDesignSpec identity(int dim);
  static GaussianDesignSpec diagonal(const VectorXd& variances);
  /// Sigma_ij = rho^|i-j|.
  static GaussianDesignSpec toeplitz(int dim, double rho);
  static GaussianDesignSpec from_covariance(const MatrixXd& sigma);

  int dim() const { return static_cast<int>(covariance_.rows()); }
  bool is_identity() const { return identity_; }
  const MatrixXd& covariance() const { return covariance_; }
  double trace() const { return trace_; }
  /// F with F F^T = Sigma; rows are drawn as F z.
  const MatrixXd& factor() const { return factor_; }
  /// Symmetric square root Sigma^{1/2}.
  const MatrixXd& sqrt_covariance() const { return sqrt_covariance_; }
  std::string describe() const;

 private:
  GaussianDesignSpec(MatrixXd sigma, bool identity, std::string label);

  MatrixXd covariance_;
  MatrixXd factor_;
  MatrixXd sqrt_covariance_;
  double trace_ = 0.0;
  bool identity_ = false;
  std::string label_;
};

/// Symmetric noise laws with closed-form (or special-function) cdfs.
class NoiseModel {
 public:
  enum class Kind { Gaussian, StudentT, Cauchy };

  static NoiseModel gaussian(double sigma);
  static NoiseModel student_t(double df);
  static NoiseModel cauchy(double scale);
  /// Parses "gaussian:1", "student_t:2", "cauchy:1" (the `name()` format).
  static NoiseModel parse(std::string_view text);

  Kind kind() const { return kind_; }
  /// sigma, df or scale depending on the kind.
  double parameter() const { return param_; }

  double cdf(double t) const;
  /// F(a) - F(-a), computed without cancellation. Negative for a < 0.
  double central_mass(double a) const;
  std::string name() const;

  friend bool operator==(const NoiseModel&, const NoiseModel&) = default;

 private:
  NoiseModel(Kind kind, double param) : kind_(kind), param_(param) {}

  Kind kind_;
  double param_;
};

struct UniformRange {
  double lo = -1e5;
  double hi = 1e5;
};
struct ConstantShift {
  double shift = 0.0;
};
/// label -> -10 * label.
struct AdversarialFlip {};

using OutlierGenerator = std::variant<UniformRange, ConstantShift, AdversarialFlip>;

struct ContaminationSpec {
  int count = 0;
  OutlierGenerator generator = UniformRange{};
  std::uint64_t seed = 0;
};

class GroundTruth {
 public:
  GroundTruth() = default;
  explicit GroundTruth(VectorXd coefficients);

  const VectorXd& coefficients() const { return coefficients_; }
  int sparsity() const { return sparsity_; }

 private:
  VectorXd coefficients_;
  int sparsity_ = 0;
};

/// s nonzero entries at uniformly chosen positions, values N(0, 1).
GroundTruth random_sparse_truth(int dim, int sparsity, std::uint64_t seed);

struct ContaminatedDataset {
  MatrixXd design;
  VectorXd labels;
  std::vector<int> informative_idx;
  std::vector<int> outlier_idx;
  std::optional<GroundTruth> truth;
  /// False when loaded from a file without an is_outlier column; every index
  /// is then listed as informative.
  bool partition_known = true;

  int n() const { return static_cast<int>(design.rows()); }
  int dim() const { return static_cast<int>(design.cols()); }
};

struct InjectionResult {
  VectorXd labels;
  std::vector<int> outlier_idx;  // sorted ascending
};

MatrixXd generate_design(const GaussianDesignSpec& spec, int n, std::uint64_t seed);
VectorXd sample_noise(const NoiseModel& model, int n, std::uint64_t seed);
InjectionResult inject_outliers(const VectorXd& labels, const ContaminationSpec& spec);

/// Design, clean labels X t* + eps, then label contamination. Sub-seeds:
/// design = derive_seed(seed, 0), noise = derive_seed(seed, 1); the
/// contamination uses its own spec.seed.
ContaminatedDataset make_regression_dataset(const GaussianDesignSpec& design_spec,
                                            const GroundTruth& truth,
                                            const NoiseModel& noise,
                                            const ContaminationSpec& contamination, int n,
                                            std::uint64_t seed);

}  // namespace huberbench
