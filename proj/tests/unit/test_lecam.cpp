#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "huberbench/lecam.hpp"

using namespace huberbench;

namespace {

// Random 20-atom joint laws (4 x-atoms, 5 y-atoms) sharing the x-marginal.
std::pair<DiscreteJoint<double>, DiscreteJoint<double>> random_pair(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  const std::size_t nx = 4, ny = 5;
  DiscreteJoint<double> p1{{0, 1, 2, 3}, {-2, -1, 0, 1, 2}, std::vector<double>(nx * ny)};
  DiscreteJoint<double> p2 = p1;
  std::vector<double> px(nx);
  double total = 0.0;
  for (auto& v : px) total += (v = u(rng));
  for (auto& v : px) v /= total;
  for (std::size_t i = 0; i < nx; ++i) {
    for (auto* p : {&p1, &p2}) {
      std::vector<double> cond(ny);
      double s = 0.0;
      for (auto& c : cond) s += (c = u(rng));
      for (std::size_t j = 0; j < ny; ++j) p->probs[i * ny + j] = px[i] * cond[j] / s;
    }
  }
  // Renormalize the row sums so both marginals agree to the last bit.
  for (std::size_t i = 0; i < nx; ++i) {
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t j = 0; j < ny; ++j) {
      s1 += p1.probs[i * ny + j];
      s2 += p2.probs[i * ny + j];
    }
    p2.probs[i * ny + ny - 1] += s1 - s2;
  }
  return {p1, p2};
}

}  // namespace

TEST_CASE("total variation") {
  const auto [p1, p2] = demo_pair();
  CHECK(total_variation(p1, p1) == Rational(0));
  CHECK(total_variation(p1, p2) == Rational(1, 5));
  DiscreteJoint<Rational> a{{0.0}, {0.0, 1.0}, {Rational(1), Rational(0)}};
  DiscreteJoint<Rational> b{{0.0}, {0.0, 1.0}, {Rational(0), Rational(1)}};
  CHECK(total_variation(a, b) == Rational(1));
}

TEST_CASE("worked two-atom coupling") {
  const auto [p1, p2] = demo_pair();
  const auto pair = lecam_contamination_pair(p1, p2);
  CHECK(pair.tv == Rational(1, 5));
  CHECK(pair.eps_prime == Rational(1, 6));
  CHECK(pair.q1.probs == std::vector<Rational>{Rational(0), Rational(1)});
  CHECK(pair.q2.probs == std::vector<Rational>{Rational(1), Rational(0)});
  CHECK(x_marginal(pair.q1) == x_marginal(p1));
  CHECK(pair.preserves_input_marginal);
  const auto check = verify_mixture_identity(p1, p2, pair.eps_prime, pair.q1, pair.q2);
  CHECK(check.holds);
  CHECK(check.max_discrepancy == 0.0);
  const auto m = mixture(p1, pair.q1, pair.eps_prime);
  CHECK(m == std::vector<Rational>{Rational(1, 2), Rational(1, 2)});
  CHECK(m == mixture(p2, pair.q2, pair.eps_prime));
}

TEST_CASE("coupling rejects degenerate inputs") {
  const auto [p1, p2] = demo_pair();
  CHECK_THROWS_AS(lecam_contamination_pair(p1, p1), std::invalid_argument);
  DiscreteJoint<Rational> other{{1.0}, {-1.0, 1.0}, {Rational(1, 2), Rational(1, 2)}};
  CHECK_THROWS_AS(lecam_contamination_pair(p1, other), std::invalid_argument);
  DiscreteJoint<Rational> bad{{0.0}, {-1.0, 1.0}, {Rational(1, 2), Rational(1, 3)}};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  DiscreteJoint<Rational> x1{{0.0, 1.0}, {0.0, 1.0}, {Rational(1, 4), Rational(1, 4), Rational(1, 4), Rational(1, 4)}};
  DiscreteJoint<Rational> x2{{0.0, 1.0}, {0.0, 1.0}, {Rational(1, 2), Rational(1, 4), Rational(0), Rational(1, 4)}};
  CHECK_THROWS_AS(lecam_contamination_pair(x1, x2), std::invalid_argument);
}

TEST_CASE("exact coupling on multi-atom rational pairs") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> w(1, 9);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t nx = 3, ny = 4;
    DiscreteJoint<Rational> p1{{0, 1, 2}, {0, 1, 2, 3}, std::vector<Rational>(nx * ny)};
    DiscreteJoint<Rational> p2 = p1;
    const Rational px[3] = {Rational(1, 2), Rational(1, 3), Rational(1, 6)};
    for (std::size_t i = 0; i < nx; ++i) {
      for (auto* p : {&p1, &p2}) {
        int cond[4], s = 0;
        for (int& c : cond) s += (c = w(rng));
        for (std::size_t j = 0; j < ny; ++j) p->probs[i * ny + j] = px[i] * Rational(cond[j], s);
      }
    }
    if (p1.probs == p2.probs) continue;
    const auto pair = lecam_contamination_pair(p1, p2);
    // Scheffe: the positive part of p2 - p1 carries exactly the TV mass.
    Rational pos(0);
    for (std::size_t k = 0; k < p1.probs.size(); ++k)
      if (p2.probs[k] > p1.probs[k]) pos += p2.probs[k] - p1.probs[k];
    CHECK(pos == pair.tv);
    pair.q1.validate();
    pair.q2.validate();
    CHECK(verify_mixture_identity(p1, p2, pair.eps_prime, pair.q1, pair.q2).holds);
    CHECK(x_marginal(pair.q1) == x_marginal(pair.q2));
  }
}

TEST_CASE("randomized floating-point pairs") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const auto [p1, p2] = random_pair(rng);
    const auto pair = lecam_contamination_pair(p1, p2);
    // Brute-force TV over all atoms.
    double tv = 0.0;
    for (std::size_t k = 0; k < p1.probs.size(); ++k) tv += std::abs(p1.probs[k] - p2.probs[k]);
    CHECK(std::abs(pair.tv - tv / 2.0) <= 1e-15);
    const auto check = verify_mixture_identity(p1, p2, pair.eps_prime, pair.q1, pair.q2);
    CHECK(check.holds);
    CHECK(check.max_discrepancy <= 1e-12);
    double s1 = 0.0, s2 = 0.0;
    for (double v : pair.q1.probs) {
      CHECK(v >= 0.0);
      s1 += v;
    }
    for (double v : pair.q2.probs) s2 += v;
    CHECK(std::abs(s1 - 1.0) <= 1e-12);
    CHECK(std::abs(s2 - 1.0) <= 1e-12);
  }
}

TEST_CASE("modulus of continuity") {
  auto point = [](Rational a, Rational b, Rational c) {
    return DiscreteJoint<Rational>{{0.0}, {0.0, 1.0, 2.0}, {a, b, c}};
  };
  // Location family on three label atoms, theta = location.
  std::vector<std::pair<double, DiscreteJoint<Rational>>> family = {
      {0.0, point(Rational(1, 2), Rational(1, 2), Rational(0))},
      {1.0, point(Rational(0), Rational(1, 2), Rational(1, 2))},
      {0.5, point(Rational(1, 3), Rational(1, 3), Rational(1, 3))},
  };
  const std::function<double(const double&, const double&)> loss = [](const double& a, const double& b) {
    return std::abs(a - b);
  };
  // Pairwise TV: (0,1) = 1/2, (0,0.5) = 1/3, (1,0.5) = 1/3.
  CHECK(modulus_of_continuity(family, loss, Rational(0)) == 0.0);
  CHECK(modulus_of_continuity(family, loss, Rational(1, 5)) == 0.0);  // threshold 1/4
  CHECK(modulus_of_continuity(family, loss, Rational(1, 4)) == 0.5);  // threshold 1/3
  CHECK(modulus_of_continuity(family, loss, Rational(1, 3)) == 1.0);  // threshold 1/2
  CHECK(modulus_of_continuity(family, loss, Rational(1, 3)) == 1.0);   // threshold 1/2
  CHECK(modulus_of_continuity(family, loss, Rational(9, 10)) == 1.0);
  CHECK_THROWS(modulus_of_continuity(family, loss, Rational(1)));
}
