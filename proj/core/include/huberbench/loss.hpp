#pragma once

#include <variant>

namespace huberbench {

/// Huber threshold. The loss is quadratic for residuals up to `gamma` and
/// linear beyond, so it is Lipschitz with constant `gamma`.
class HuberParams {
 public:
  explicit HuberParams(double gamma);

  double gamma() const { return gamma_; }
  double lipschitz_constant() const { return gamma_; }

 private:
  double gamma_;
};

/// 0.5 (y - u)^2 if |u - y| <= gamma, else gamma |y - u| - gamma^2 / 2.
double huber_value(double u, double y, const HuberParams& params);

/// Derivative in the prediction `u`; magnitude never exceeds gamma.
double huber_grad(double u, double y, const HuberParams& params);

/// argmin_z 0.5 (z - v)^2 + step * huber(z, y).
double huber_prox(double v, double y, double step, const HuberParams& params);

/// Convex Lipschitz loss ell(u, y). Only the Huber loss ships; other kinds
/// (absolute, quantile) plug in as additional variant alternatives.
class LossDescriptor {
 public:
  using Kind = std::variant<HuberParams>;

  explicit LossDescriptor(Kind kind) : kind_(kind) {}
  static LossDescriptor huber(double gamma) { return LossDescriptor(HuberParams(gamma)); }

  const Kind& kind() const { return kind_; }
  double lipschitz_constant() const;

  double value(double u, double y) const;
  double derivative(double u, double y) const;
  double prox(double v, double y, double step) const;

 private:
  Kind kind_;
};

}  // namespace huberbench
