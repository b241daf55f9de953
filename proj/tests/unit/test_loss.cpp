#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "huberbench/loss.hpp"

using namespace huberbench;

namespace {

// Integral of clip(t, -g, g) over [s, s + h]. On a single piece it is
// written in terms of h, so nearby points give a small, accurate result.
double huber_increment(double s, double h, double g) {
  const double r = s + h;
  if (std::abs(s) <= g && std::abs(r) <= g) return h * (s + 0.5 * h);
  if (s >= g && r >= g) return g * h;
  if (s <= -g && r <= -g) return -g * h;
  const double lo = std::min(s, r), hi = std::max(s, r);
  double out = 0.0;
  if (lo < -g) out -= g * (std::min(hi, -g) - lo);
  const double a = std::max(lo, -g), b = std::min(hi, g);
  if (a < b) out += 0.5 * (b - a) * (b + a);
  if (hi > g) out += g * (hi - std::max(lo, g));
  return h < 0.0 ? -out : out;
}

// Golden-section minimizer of 0.5 (z - v)^2 + tau huber(z, y). Points are
// compared through the objective difference, which stays accurate where the
// objective itself is flat to machine precision.
double golden_prox(double v, double y, double tau, const HuberParams& p) {
  auto less = [&](double a, double b) {
    const double diff = 0.5 * (a - b) * ((a - v) + (b - v)) + tau * huber_increment(b - y, a - b, p.gamma());
    return diff < 0.0;
  };
  double lo = std::min(v, y) - 1.0, hi = std::max(v, y) + 1.0;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
  for (int k = 0; k < 300 && lo < a && b < hi; ++k) {
    if (less(a, b)) {
      hi = b;
      b = a;
      a = hi - g * (hi - lo);
    } else {
      lo = a;
      a = b;
      b = lo + g * (hi - lo);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("huber params reject non-positive thresholds") {
  CHECK_THROWS_AS(HuberParams(0.0), std::invalid_argument);
  CHECK_THROWS_AS(HuberParams(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(HuberParams(std::nan("")), std::invalid_argument);
  CHECK(HuberParams(2.5).lipschitz_constant() == 2.5);
}

TEST_CASE("huber value on both branches") {
  const HuberParams p(1.0);
  CHECK(huber_value(0.0, 0.0, p) == 0.0);
  CHECK(huber_value(0.0, 0.5, p) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(huber_value(0.0, 2.0, p) == doctest::Approx(1.5).epsilon(1e-15));
  // Continuity at the kink.
  CHECK(huber_value(1.0, 0.0, p) == doctest::Approx(0.5));
}

TEST_CASE("huber gradient") {
  const HuberParams p(1.0);
  CHECK(huber_grad(0.5, 0.0, p) == doctest::Approx(0.5));
  CHECK(huber_grad(3.0, 0.0, p) == 1.0);
  CHECK(huber_grad(-3.0, 0.0, p) == -1.0);
  CHECK(huber_grad(1.7, 1.7, p) == 0.0);
}

TEST_CASE("huber prox closed form") {
  const HuberParams p(1.0);
  CHECK(huber_prox(1.0, 0.0, 1.0, p) == doctest::Approx(0.5));
  CHECK(huber_prox(5.0, 0.0, 1.0, p) == doctest::Approx(4.0));
  CHECK(huber_prox(-0.3, -0.3, 2.0, p) == -0.3);
  CHECK_THROWS_AS(huber_prox(1.0, 0.0, 0.0, p), std::invalid_argument);
}

TEST_CASE("prox agrees with golden-section search") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> val(-10.0, 10.0), pos(0.05, 5.0);
  for (int k = 0; k < 1000; ++k) {
    const double v = val(rng), y = val(rng), tau = pos(rng);
    const HuberParams p(pos(rng));
    CHECK(std::abs(huber_prox(v, y, tau, p) - golden_prox(v, y, tau, p)) <= 1e-8);
  }
}

TEST_CASE("gradient agrees with central differences") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> val(-5.0, 5.0), pos(0.1, 3.0);
  int checked = 0;
  for (int k = 0; k < 2000; ++k) {
    const double u = val(rng), y = val(rng);
    const HuberParams p(pos(rng));
    const double dist = std::abs(std::abs(u - y) - p.gamma());
    const double h = 1e-6;
    const double fd = (huber_value(u + h, y, p) - huber_value(u - h, y, p)) / (2 * h);
    const double g = huber_grad(u, y, p);
    if (dist > 1e-3) {
      CHECK(std::abs(fd - g) <= 1e-6 * std::max(1.0, std::abs(g)));
      ++checked;
    } else if (dist <= 1e-6) {
      CHECK(std::abs(fd - g) <= 1e-3 * std::max(1.0, std::abs(g)));
    }
  }
  CHECK(checked > 1500);
}

TEST_CASE("convexity and Lipschitz on a grid") {
  for (double gamma : {0.3, 1.0, 4.0}) {
    const HuberParams p(gamma);
    for (double y : {-2.0, 0.0, 1.5}) {
      for (double u1 = -6.0; u1 <= 6.0; u1 += 0.37) {
        for (double u2 = -6.0; u2 <= 6.0; u2 += 0.41) {
          const double f1 = huber_value(u1, y, p), f2 = huber_value(u2, y, p);
          CHECK(std::abs(f1 - f2) <= gamma * std::abs(u1 - u2) + 1e-12);
          for (double t : {0.1, 0.5, 0.9}) {
            CHECK(huber_value(t * u1 + (1 - t) * u2, y, p) <= t * f1 + (1 - t) * f2 + 1e-12);
          }
        }
      }
    }
  }
}

TEST_CASE("loss descriptor dispatches to huber") {
  const LossDescriptor d = LossDescriptor::huber(2.0);
  const HuberParams p(2.0);
  CHECK(d.lipschitz_constant() == 2.0);
  CHECK(d.value(1.0, -3.0) == huber_value(1.0, -3.0, p));
  CHECK(d.derivative(1.0, -3.0) == huber_grad(1.0, -3.0, p));
  CHECK(d.prox(1.0, -3.0, 0.5) == huber_prox(1.0, -3.0, 0.5, p));
}
