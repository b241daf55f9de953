#include "huberbench/loss.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace huberbench {

namespace {

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw std::invalid_argument(std::string("huber loss: non-finite ") + what);
  }
}

}  // namespace

HuberParams::HuberParams(double gamma) : gamma_(gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("HuberParams: gamma must be positive and finite");
  }
}

double huber_value(double u, double y, const HuberParams& params) {
  require_finite(u, "prediction");
  require_finite(y, "label");
  const double g = params.gamma();
  const double r = std::abs(u - y);
  if (r <= g) return 0.5 * r * r;
  return g * r - 0.5 * g * g;
}

double huber_grad(double u, double y, const HuberParams& params) {
  require_finite(u, "prediction");
  require_finite(y, "label");
  const double g = params.gamma();
  const double r = u - y;
  if (std::abs(r) <= g) return r;
  return r > 0.0 ? g : -g;
}

double huber_prox(double v, double y, double step, const HuberParams& params) {
  require_finite(v, "prox point");
  require_finite(y, "label");
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw std::invalid_argument("huber_prox: step must be positive and finite");
  }
  const double g = params.gamma();
  const double r = v - y;
  if (std::abs(r) <= (1.0 + step) * g) return y + r / (1.0 + step);
  return r > 0.0 ? v - step * g : v + step * g;
}

double LossDescriptor::lipschitz_constant() const {
  return std::visit([](const HuberParams& p) { return p.lipschitz_constant(); }, kind_);
}

double LossDescriptor::value(double u, double y) const {
  return std::visit([&](const HuberParams& p) { return huber_value(u, y, p); }, kind_);
}

double LossDescriptor::derivative(double u, double y) const {
  return std::visit([&](const HuberParams& p) { return huber_grad(u, y, p); }, kind_);
}

double LossDescriptor::prox(double v, double y, double step) const {
  return std::visit([&](const HuberParams& p) { return huber_prox(v, y, step, p); }, kind_);
}

}  // namespace huberbench
