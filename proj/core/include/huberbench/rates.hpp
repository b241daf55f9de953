#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "huberbench/data.hpp"

namespace huberbench {

/// Inputs shared by the rate formulas. `c_abs` is the unidentified absolute
/// constant that multiplies every bound; it defaults to 1 and is echoed in
/// every report.
struct RateInputs {
  double gamma = 1.0;
  /// Local Bernstein constant; A = 4 / alpha.
  double alpha = 1.0;
  long n = 0;
  long n_outliers = 0;
  double delta = 0.05;
  std::optional<double> trace_sigma;
  std::optional<long> sparsity;
  std::optional<long> dim;
  std::optional<double> kappa;
  /// Spectral decay exponent p in (0, 1).
  std::optional<double> decay_p;
  double c_abs = 1.0;

  void validate() const;
};

enum class DominantTerm { Complexity, Confidence, Outliers };

std::string to_string(DominantTerm term);

struct ConditionVerdict {
  std::string name;
  bool holds = false;
  double margin = 0.0;
};

struct TheoryReport {
  std::string formula;
  /// max of `terms`.
  double rate = 0.0;
  DominantTerm dominant_term = DominantTerm::Complexity;
  /// complexity, confidence, outliers (each already multiplied by c_abs).
  std::array<double, 3> terms{};
  std::optional<double> l1_rate;
  /// Regularization level prescribed by the corresponding guarantee.
  std::optional<double> lambda;
  /// Outlier count at which the outlier term overtakes the complexity term.
  std::optional<double> outlier_crossover;
  RateInputs inputs_echo;
  std::vector<ConditionVerdict> condition_verdicts;

  std::string to_text() const;
  static std::string csv_header();
  std::string to_csv_row() const;
};

/// c (gamma/alpha) max( sqrt(max(Tr Sigma, log 1/delta) / N), |O| / N ).
TheoryReport rate_erm(const RateInputs& in);

/// l1-penalized Huber, isotropic design:
///   l2: c (gamma/alpha) max( sqrt(max(s log p, log 1/delta) / N), |O| / N )
///   l1: c (gamma/alpha) max( s sqrt(log p / N), sqrt(s log(1/delta) / N), sqrt(s) |O| / N )
///   lambda = c gamma max( sqrt(log p / N), sqrt(log(1/delta) / (s N)), |O| / (sqrt(s) N) )
TheoryReport rate_lasso(const RateInputs& in);

/// As rate_lasso for a design whose covariance satisfies RE(s, 9) with constant kappa.
TheoryReport rate_lasso_re(const RateInputs& in);

/// RKHS Huber with decay exponent p:
///   c max( (gamma/alpha)^{1/(p+1)} / N^{1/(2(p+1))}, (gamma/alpha) sqrt(log(1/delta)/N), (gamma/alpha)|O|/N ),
/// lambda = c alpha rate, crossover |O| = (alpha/gamma)^{p/(p+1)} N^{(2p+1)/(2p+2)}.
/// The rate bounds the squared L2 error.
TheoryReport rate_rkhs(const RateInputs& in);

/// Appends the local Bernstein verdict for `noise` at radius r = report.rate.
void attach_bernstein_check(TheoryReport& report, const NoiseModel& noise, double multiplier = 18.0);

}  // namespace huberbench
