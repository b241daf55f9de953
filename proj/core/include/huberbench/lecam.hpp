#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace huberbench {

using Rational = boost::multiprecision::cpp_rational;

namespace lecam_detail {

template <class T>
T abs_value(const T& x) {
  return x < T(0) ? T(-x) : x;
}

template <class T>
double to_double(const T& x) {
  return static_cast<double>(x);
}

template <class T>
constexpr bool is_exact() {
  return !std::is_floating_point_v<T>;
}

template <class T>
bool sums_to_one(const T& sum) {
  if constexpr (is_exact<T>()) {
    return sum == T(1);
  } else {
    return std::abs(sum - 1.0) <= 1e-12;
  }
}

}  // namespace lecam_detail

/// Finite joint law of (X, Y). probs is row-major: probs[i * ny + j] is the
/// mass of (support_x[i], support_y[j]).
template <class T>
struct DiscreteJoint {
  std::vector<double> support_x;
  std::vector<double> support_y;
  std::vector<T> probs;

  std::size_t nx() const { return support_x.size(); }
  std::size_t ny() const { return support_y.size(); }
  const T& at(std::size_t i, std::size_t j) const { return probs[i * ny() + j]; }

  void validate() const {
    if (support_x.empty() || support_y.empty()) throw std::invalid_argument("discrete joint: empty support");
    if (probs.size() != nx() * ny()) throw std::invalid_argument("discrete joint: probs size does not match supports");
    T sum(0);
    for (const T& v : probs) {
      if (v < T(0)) throw std::invalid_argument("discrete joint: negative probability");
      sum += v;
    }
    if (!lecam_detail::sums_to_one(sum)) {
      throw std::invalid_argument("discrete joint: probabilities sum to " +
                                  std::to_string(lecam_detail::to_double(sum)) + ", not 1");
    }
  }
};

template <class T>
bool same_supports(const DiscreteJoint<T>& p, const DiscreteJoint<T>& q) {
  return p.support_x == q.support_x && p.support_y == q.support_y && p.probs.size() == q.probs.size();
}

template <class T>
std::vector<T> x_marginal(const DiscreteJoint<T>& p) {
  std::vector<T> out(p.nx(), T(0));
  for (std::size_t i = 0; i < p.nx(); ++i)
    for (std::size_t j = 0; j < p.ny(); ++j) out[i] += p.at(i, j);
  return out;
}

/// 1/2 sum |p - q| over atoms.
template <class T>
T total_variation(const DiscreteJoint<T>& p, const DiscreteJoint<T>& q) {
  if (!same_supports(p, q)) throw std::invalid_argument("total_variation: support mismatch");
  T sum(0);
  for (std::size_t k = 0; k < p.probs.size(); ++k) sum += lecam_detail::abs_value(T(p.probs[k] - q.probs[k]));
  return sum / T(2);
}

template <class T>
struct ContaminationPair {
  T tv;
  /// tv / (1 + tv), the solution of tv = eps' / (1 - eps').
  T eps_prime;
  /// (p2 - p1)_+ / tv.
  DiscreteJoint<T> q1;
  /// (p1 - p2)_+ / tv.
  DiscreteJoint<T> q2;
  /// q1 and q2 always share one x-marginal. It coincides with the common
  /// x-marginal of p1 and p2 only when the conditional disagreement at each x
  /// is proportional to p_X(x); this flag reports whether it does.
  bool preserves_input_marginal = false;
};

/// Couples p1 and p2 so that (1 - eps') p1 + eps' q1 = (1 - eps') p2 + eps' q2.
/// Requires p1 and p2 to share their x-marginal and to differ somewhere.
template <class T>
ContaminationPair<T> lecam_contamination_pair(const DiscreteJoint<T>& p1, const DiscreteJoint<T>& p2) {
  p1.validate();
  p2.validate();
  if (!same_supports(p1, p2)) throw std::invalid_argument("lecam_contamination_pair: support mismatch");
  const auto m1 = x_marginal(p1);
  const auto m2 = x_marginal(p2);
  for (std::size_t i = 0; i < m1.size(); ++i) {
    bool equal;
    if constexpr (lecam_detail::is_exact<T>()) {
      equal = m1[i] == m2[i];
    } else {
      equal = std::abs(m1[i] - m2[i]) <= 1e-12;
    }
    if (!equal) throw std::invalid_argument("lecam_contamination_pair: x-marginals differ");
  }
  const T tv = total_variation(p1, p2);
  if (tv == T(0)) throw std::invalid_argument("lecam_contamination_pair: identical laws (TV = 0)");

  ContaminationPair<T> out{tv, tv / (T(1) + tv), p1, p1, false};
  for (std::size_t k = 0; k < p1.probs.size(); ++k) {
    const T d = p2.probs[k] - p1.probs[k];
    out.q1.probs[k] = d > T(0) ? T(d / tv) : T(0);
    out.q2.probs[k] = d < T(0) ? T(-d / tv) : T(0);
  }
  const auto mq = x_marginal(out.q1);
  out.preserves_input_marginal = true;
  for (std::size_t i = 0; i < mq.size(); ++i) {
    const T gap = lecam_detail::abs_value(T(mq[i] - m1[i]));
    if constexpr (lecam_detail::is_exact<T>()) {
      if (gap != T(0)) out.preserves_input_marginal = false;
    } else {
      if (gap > 1e-12) out.preserves_input_marginal = false;
    }
  }
  return out;
}

struct MixtureCheck {
  bool holds = false;
  double max_discrepancy = 0.0;
};

/// (1 - eps') p1 + eps' q1 against (1 - eps') p2 + eps' q2, atom by atom.
/// Exact equality for rational inputs, 1e-12 for doubles.
template <class T>
MixtureCheck verify_mixture_identity(const DiscreteJoint<T>& p1, const DiscreteJoint<T>& p2, const T& eps_prime,
                                     const DiscreteJoint<T>& q1, const DiscreteJoint<T>& q2) {
  if (!same_supports(p1, p2) || !same_supports(p1, q1) || !same_supports(p1, q2)) {
    throw std::invalid_argument("verify_mixture_identity: support mismatch");
  }
  T worst(0);
  const T keep = T(1) - eps_prime;
  for (std::size_t k = 0; k < p1.probs.size(); ++k) {
    const T lhs = keep * p1.probs[k] + eps_prime * q1.probs[k];
    const T rhs = keep * p2.probs[k] + eps_prime * q2.probs[k];
    worst = std::max(worst, lecam_detail::abs_value(T(lhs - rhs)));
  }
  MixtureCheck out;
  out.max_discrepancy = lecam_detail::to_double(worst);
  if constexpr (lecam_detail::is_exact<T>()) {
    out.holds = worst == T(0);
  } else {
    out.holds = worst <= 1e-12;
  }
  return out;
}

template <class T>
std::vector<T> mixture(const DiscreteJoint<T>& p, const DiscreteJoint<T>& q, const T& eps_prime) {
  std::vector<T> out(p.probs.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = (T(1) - eps_prime) * p.probs[k] + eps_prime * q.probs[k];
  return out;
}

/// sup { loss(theta_1, theta_2) : TV(P_1, P_2) <= eps / (1 - eps) } over all
/// ordered pairs of the family, including theta_1 = theta_2.
template <class Theta, class T>
double modulus_of_continuity(const std::vector<std::pair<Theta, DiscreteJoint<T>>>& family,
                             const std::function<double(const Theta&, const Theta&)>& loss, const T& eps) {
  if (family.empty()) throw std::invalid_argument("modulus_of_continuity: empty family");
  if (eps < T(0) || !(eps < T(1))) throw std::invalid_argument("modulus_of_continuity: eps must lie in [0, 1)");
  const T threshold = eps / (T(1) - eps);
  double best = 0.0;
  for (std::size_t a = 0; a < family.size(); ++a) {
    for (std::size_t b = 0; b < family.size(); ++b) {
      if (total_variation(family[a].second, family[b].second) <= threshold) {
        best = std::max(best, loss(family[a].first, family[b].first));
      }
    }
  }
  return best;
}

/// The two-atom pair P1 = (3/5, 2/5), P2 = (2/5, 3/5) on a single design atom.
inline std::pair<DiscreteJoint<Rational>, DiscreteJoint<Rational>> demo_pair() {
  DiscreteJoint<Rational> p1{{0.0}, {-1.0, 1.0}, {Rational(3, 5), Rational(2, 5)}};
  DiscreteJoint<Rational> p2{{0.0}, {-1.0, 1.0}, {Rational(2, 5), Rational(3, 5)}};
  return {p1, p2};
}

}  // namespace huberbench
