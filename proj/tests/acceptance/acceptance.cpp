// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "huberbench/complexity.hpp"
#include "huberbench/conditions.hpp"
#include "huberbench/data.hpp"
#include "huberbench/experiments.hpp"
#include "huberbench/kernel.hpp"
#include "huberbench/lecam.hpp"
#include "huberbench/loss.hpp"
#include "huberbench/rates.hpp"
#include "huberbench/report.hpp"
#include "huberbench/solvers.hpp"

#ifdef HUBERBENCH_WITH_CLI
#include "cli.hpp"
#endif

using namespace huberbench;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string num(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome sweep_criterion(const SweepConfig& cfg, double budget_seconds) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const SweepResult result = sweep_outliers(cfg);
  const double elapsed = seconds_since(t0);
  const SweepSummary summary = summarize(result, 0.05);
  int converged = 0;
  for (const auto& row : result.rows) converged += row.converged ? 1 : 0;
  o.note("runtime " + num(elapsed, 3) + " s, converged " + std::to_string(converged) + "/" +
         std::to_string(result.rows.size()));
  o.require(elapsed <= budget_seconds, "runtime above " + num(budget_seconds, 3) + " s");
  for (const auto& n : summary.per_noise) {
    const double r2 = n.fit ? n.fit->r2 : 0.0;
    o.note(n.noise + ": spearman " + num(n.spearman) + ", r2 " + num(r2));
    o.require(n.spearman >= 0.95, n.noise + " spearman < 0.95");
    o.require(r2 >= 0.9, n.noise + " r2 < 0.9");
  }
  return o;
}

// 1. fig1 preset: Huber ERM, p = 50.
Outcome criterion_fig1() { return sweep_criterion(fig1_config(), 300.0); }

// 2. fig2 preset: l1-penalized Huber, p = N = 1000.
Outcome criterion_fig2() { return sweep_criterion(fig2_config(), 900.0); }

// 3. OLS against Huber ERM at 10% outliers.
Outcome criterion_robustness() {
  Outcome o;
  for (const auto& noise : {NoiseModel::gaussian(1.0), NoiseModel::cauchy(1.0)}) {
    SweepConfig cfg = fig1_config();
    cfg.noise_models = {noise};
    cfg.outlier_fractions = {0.1};
    cfg.root_seed = 3;
    const auto huber = summarize(sweep_outliers(cfg));
    cfg.estimator = OlsBaseline{};
    const auto ols = summarize(sweep_outliers(cfg));
    const double ratio = ols.points[0].mean_l2 / huber.points[0].mean_l2;
    o.note(noise.name() + " ratio " + num(ratio));
    o.require(ratio >= 10.0, noise.name() + " ratio < 10");
  }
  return o;
}

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

// Golden-section minimizer of 0.5 (z - v)^2 + tau huber(z, y), comparing
// points through the objective difference.
double golden_prox(double v, double y, double tau, const HuberParams& p) {
  auto less = [&](double a, double b) {
    return 0.5 * (a - b) * ((a - v) + (b - v)) + tau * huber_increment(b - y, a - b, p.gamma()) < 0.0;
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

// 4. Prox and gradient oracles.
Outcome criterion_prox() {
  Outcome o;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> val(-20.0, 20.0), pos(0.01, 10.0);
  double worst_prox = 0.0, worst_grad = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const HuberParams p(pos(rng));
    const double v = val(rng), y = val(rng), tau = pos(rng);
    worst_prox = std::max(worst_prox, std::abs(huber_prox(v, y, tau, p) - golden_prox(v, y, tau, p)));
  }
  int grad_checks = 0;
  while (grad_checks < 1000) {
    const HuberParams p(pos(rng));
    const double u = val(rng), y = val(rng);
    if (std::abs(std::abs(u - y) - p.gamma()) < 1e-3) continue;
    const double h = 1e-6;
    const double fd = (huber_value(u + h, y, p) - huber_value(u - h, y, p)) / (2.0 * h);
    const double g = huber_grad(u, y, p);
    worst_grad = std::max(worst_grad, std::abs(fd - g) / std::max(1.0, std::abs(g)));
    ++grad_checks;
  }
  o.note("max prox error " + num(worst_prox) + ", max relative gradient error " + num(worst_grad));
  o.require(worst_prox <= 1e-8, "prox error above 1e-8");
  o.require(worst_grad <= 1e-6, "gradient error above 1e-6");
  return o;
}

// 5. Bernstein check against the arctan form for Cauchy(1) noise.
Outcome criterion_bernstein() {
  Outcome o;
  int disagreements = 0;
  for (int i = 0; i < 100; ++i) {
    for (int j = 0; j < 100; ++j) {
      const double gamma = 0.02 + 0.06 * i;
      const double r = 0.0015 * j;
      const double alpha = 0.005 + 0.0099 * ((7 * i + 13 * j) % 100);
      const bool arctan_rule = std::atan(gamma - 18.0 * r) >= std::numbers::pi * alpha / 2.0;
      if (bernstein_check(NoiseModel::cauchy(1.0), gamma, r, alpha).holds != arctan_rule) ++disagreements;
    }
  }
  const double gamma = 2.0 * std::tan(std::numbers::pi / 8.0);
  const auto cert = bernstein_check(NoiseModel::cauchy(1.0), gamma, 0.0, 0.25);
  const double expected = 2.0 * std::atan(gamma) / std::numbers::pi - 0.25;
  o.note(std::to_string(disagreements) + " disagreements on 10^4 points, certified margin " + num(cert.margin, 12));
  o.require(disagreements == 0, "grid disagreements");
  o.require(cert.holds && cert.margin >= 0.19 && std::abs(cert.margin - expected) <= 1e-12, "certified instance");
  return o;
}

// 6. Rate arithmetic.
Outcome criterion_rates() {
  Outcome o;
  RateInputs in;
  in.trace_sigma = 50.0;
  in.n = 1000;
  in.delta = std::exp(-1.0);
  const double erm = rate_erm(in).rate;
  o.note("rate_erm " + num(erm, 15));
  o.require(std::abs(erm - std::sqrt(0.05)) <= 1e-12, "rate_erm mismatch");

  RateInputs la;
  la.sparsity = 50;
  la.dim = 1000;
  la.n = 1000;
  la.delta = 0.9;
  const auto lr = rate_lasso(la);
  o.require(lr.dominant_term == DominantTerm::Complexity &&
                std::abs(*lr.l1_rate - std::sqrt(50.0) * lr.rate) <= 1e-12 * lr.rate,
            "l1 rate is not sqrt(s) times the l2 rate");

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int violations = 0;
  for (int k = 0; k < 10000; ++k) {
    RateInputs r;
    r.gamma = 0.1 + 4.0 * u(rng);
    r.alpha = 0.05 + 0.95 * u(rng);
    r.n = 20 + long(10000 * u(rng));
    r.delta = 0.001 + 0.99 * u(rng);
    r.trace_sigma = 0.5 + 200.0 * u(rng);
    r.dim = 2 + long(5000 * u(rng));
    r.sparsity = 1 + long(double(*r.dim - 1) * u(rng));
    r.kappa = 0.05 + u(rng);
    r.decay_p = 0.01 + 0.98 * u(rng);
    r.n_outliers = long(double(r.n / 2) * u(rng));
    RateInputs more = r;
    more.n_outliers = std::min(r.n / 2, r.n_outliers + 1 + long(50 * u(rng)));
    for (auto fn : {rate_erm, rate_lasso, rate_lasso_re, rate_rkhs})
      if (fn(more).rate < fn(r).rate) ++violations;
  }
  o.note(std::to_string(violations) + " monotonicity violations in 10^4 samples");
  o.require(violations == 0, "rates not monotone in |O|");
  return o;
}

// 7. Mean width Monte Carlo and the fixed point.
Outcome criterion_width() {
  Outcome o;
  const auto l2 = gaussian_mean_width_mc(L2Ball{1.0}, 2, 1000000, 17);
  const double z = std::abs(l2.estimate - std::sqrt(std::numbers::pi / 2.0)) / l2.std_error;
  o.note("L2Ball(1), d=2: " + num(l2.estimate, 6) + " (" + num(z, 3) + " se from sqrt(pi/2))");
  o.require(z <= 3.0, "L2 width off by more than 3 se");

  int configs = 0, above = 0;
  for (int d : {2, 10, 100, 1000}) {
    for (double r : {0.3, 1.0, 3.0}) {
      for (double rho : {0.2, 1.0, 5.0, 40.0}) {
        const long samples = d >= 1000 ? 500 : 4000;
        const auto both = gaussian_mean_width_mc(BallIntersection{r, rho}, d, samples, 5);
        const auto a = gaussian_mean_width_mc(L2Ball{r}, d, samples, 5);
        const auto b = gaussian_mean_width_mc(L1Ball{rho}, d, samples, 5);
        ++configs;
        if (both.estimate > std::min(a.estimate, b.estimate)) ++above;
      }
    }
  }
  o.note("intersection above a single ball in " + std::to_string(above) + "/" + std::to_string(configs));
  o.require(above == 0, "intersection width exceeds a single-ball width");

  double worst = 0.0;
  for (double a : {0.5, 1.0, 4.0}) {
    for (double l : {0.5, 1.0, 2.0}) {
      for (double trace : {1.0, 50.0, 1000.0}) {
        for (long n : {100L, 1000L, 100000L}) {
          const double r = fixed_point_radius([&](double rr) { return rr * std::sqrt(trace); }, a, l, n,
                                              ComplexityMode::SubGaussian);
          const double closed = a * l * std::sqrt(trace / double(n));
          worst = std::max(worst, std::abs(r - closed) / closed);
        }
      }
    }
  }
  o.note("fixed point max relative deviation " + num(worst));
  o.require(worst <= 0.005, "fixed point off by more than 0.5%");
  return o;
}

// 8. Le Cam coupling.
Outcome criterion_lecam() {
  Outcome o;
  const auto [p1, p2] = demo_pair();
  const auto pair = lecam_contamination_pair(p1, p2);
  const auto check = verify_mixture_identity(p1, p2, pair.eps_prime, pair.q1, pair.q2);
  const auto mix = mixture(p1, pair.q1, pair.eps_prime);
  o.require(pair.eps_prime == Rational(1, 6), "eps' != 1/6");
  o.require(check.holds && check.max_discrepancy == 0.0, "rational identity not exact");
  o.require(mix == std::vector<Rational>{Rational(1, 2), Rational(1, 2)}, "common mixture != (1/2, 1/2)");

  // Scheffe identity, exactly, on random rational pairs.
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> w(1, 20);
  bool scheffe = true;
  for (int t = 0; t < 50; ++t) {
    DiscreteJoint<Rational> a{{0.0, 1.0}, {0.0, 1.0, 2.0}, std::vector<Rational>(6)};
    DiscreteJoint<Rational> b = a;
    for (std::size_t i = 0; i < 2; ++i) {
      for (auto* p : {&a, &b}) {
        int c[3], s = 0;
        for (int& x : c) s += (x = w(rng));
        for (std::size_t j = 0; j < 3; ++j) p->probs[i * 3 + j] = Rational(i == 0 ? 1 : 2, 3) * Rational(c[j], s);
      }
    }
    if (a.probs == b.probs) continue;
    Rational pos(0);
    for (std::size_t k = 0; k < 6; ++k)
      if (b.probs[k] > a.probs[k]) pos += b.probs[k] - a.probs[k];
    const auto pr = lecam_contamination_pair(a, b);
    scheffe = scheffe && pos == total_variation(a, b) &&
              verify_mixture_identity(a, b, pr.eps_prime, pr.q1, pr.q2).holds;
  }
  o.require(scheffe, "Scheffe identity or rational mixture identity failed");

  double worst = 0.0;
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int t = 0; t < 100; ++t) {
    DiscreteJoint<double> a{{0, 1, 2, 3}, {0, 1, 2, 3, 4}, std::vector<double>(20)};
    DiscreteJoint<double> b = a;
    for (std::size_t i = 0; i < 4; ++i) {
      const double px = 0.25;
      for (auto* p : {&a, &b}) {
        double c[5], s = 0.0;
        for (double& x : c) s += (x = u(rng));
        for (std::size_t j = 0; j < 5; ++j) p->probs[i * 5 + j] = px * c[j] / s;
      }
      double sa = 0.0, sb = 0.0;
      for (std::size_t j = 0; j < 5; ++j) {
        sa += a.probs[i * 5 + j];
        sb += b.probs[i * 5 + j];
      }
      b.probs[i * 5 + 4] += sa - sb;
    }
    const auto pr = lecam_contamination_pair(a, b);
    worst = std::max(worst, verify_mixture_identity(a, b, pr.eps_prime, pr.q1, pr.q2).max_discrepancy);
  }
  o.note("eps' = 1/6, mixture (1/2, 1/2); max discrepancy on 100 random 20-atom pairs " + num(worst));
  o.require(worst <= 1e-12, "floating discrepancy above 1e-12");
  return o;
}

// 9. RKHS estimator and spectrum.
Outcome criterion_rkhs() {
  Outcome o;
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MatrixXd x(80, 2);
  for (auto& v : x.reshaped()) v = u(rng);
  const auto fac = gram_matrix(Kernel::rbf(0.6), x);
  const VectorXd noise = sample_noise(NoiseModel::cauchy(0.2), 80, 5);
  VectorXd y(80);
  for (int i = 0; i < 80; ++i) y[i] = std::sin(2.0 * x(i, 0)) + x(i, 1) * x(i, 1) + noise[i];
  SolverConfig cfg;
  cfg.acceleration = true;
  double worst_norm = 0.0, prev = std::numeric_limits<double>::infinity();
  bool monotone = true;
  for (double lambda : {1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.3, 1.0}) {
    const auto fit = fit_rkhs_huber(fac, y, HuberParams(1.0), lambda, cfg);
    o.require(fit.converged, "fit at lambda " + num(lambda) + " not converged");
    const double nb = fit.coefficients.norm();
    worst_norm = std::max(worst_norm, std::abs(nb - rkhs_norm(fac, *fit.representer_weights)));
    monotone = monotone && nb <= prev + 1e-8;
    prev = nb;
  }
  o.note("norm agreement " + num(worst_norm));
  o.require(worst_norm <= 1e-8, "||beta|| and sqrt(a'Ka) disagree");
  o.require(monotone, "Hilbert norm not nonincreasing in lambda");

  std::vector<double> quad, lin;
  for (int k = 1; k <= 300; ++k) {
    quad.push_back(std::pow(double(k), -2.0));
    lin.push_back(std::pow(double(k), -1.0));
  }
  const double p2 = estimate_spectrum_decay(quad).p_hat;
  const double p1 = estimate_spectrum_decay(lin).p_hat;
  o.note("p_hat " + num(p2, 8) + " and " + num(p1, 8));
  o.require(std::abs(p2 - 0.5) <= 0.005 && std::abs(p1 - 1.0) <= 0.01, "spectrum fit off by more than 1%");

  MatrixXd pts(500, 1);
  for (int i = 0; i < 500; ++i) pts(i, 0) = double(i) / 499.0;
  const auto g = gram_matrix(Kernel::rbf(0.3), pts);
  const double trace_gap = std::abs(g.eigenvalues.sum() / 500.0 - 1.0);
  o.note("trace identity gap " + num(trace_gap));
  o.require(trace_gap <= 1e-10, "trace of K/N differs from 1");
  return o;
}

// 10. Byte-identical CLI output for fixed seeds.
Outcome criterion_determinism() {
  Outcome o;
#ifdef HUBERBENCH_WITH_CLI
  const auto dir = std::filesystem::temp_directory_path() / "huberbench_acceptance";
  std::filesystem::create_directories(dir);
  {
    const auto ds = make_regression_dataset(GaussianDesignSpec::identity(4), random_sparse_truth(4, 4, 1),
                                            NoiseModel::cauchy(1.0), ContaminationSpec{5, UniformRange{}, 2}, 60, 3);
    std::ofstream data(dir / "data.csv");
    data << "x_1,x_2,x_3,x_4,y,is_outlier\n";
    for (int i = 0; i < ds.n(); ++i) {
      for (int j = 0; j < 4; ++j) data << ds.design(i, j) << ',';
      data << ds.labels[i] << ",0\n";
    }
  }
  auto read = [](const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  const std::string d = dir.string();
  const std::vector<std::vector<std::string>> commands = {
      {"sweep", "--preset", "fig1", "--n", "120", "--dim", "5", "--trials", "3", "--fractions", "0,0.1,0.2", "--seed",
       "11", "--threads", "2", "--trials-csv", d + "/trials.csv", "--summary-csv", d + "/summary.csv"},
      {"fit", "--data", d + "/data.csv", "--estimator", "l1", "--lambda", "0.01", "--output", d + "/coef.csv"},
      {"rates", "lasso-re", "--sparsity", "5", "--dim", "100", "--kappa", "0.5", "--n", "400", "--outliers", "12",
       "--format", "csv"},
      {"bernstein", "--noise", "student_t:2", "--gamma", "1.5", "--r", "0.01", "--alpha", "0.3"},
      {"complexity", "--set", "intersection", "--r", "1", "--rho", "3", "--dim", "50", "--samples", "2000", "--seed",
       "4", "--threads", "3"},
      {"complexity", "--mode", "rademacher", "--set", "l2", "--radius", "1", "--dim", "5", "--n", "20", "--samples",
       "500", "--seed", "4"},
      {"re-check", "--dim", "8", "--s", "2", "--samples", "30", "--seed", "6"},
      {"spectrum", "--n", "200", "--seed", "9"},
      {"lecam", "--demo"},
  };
  int mismatches = 0;
  for (const auto& cmd : commands) {
    std::string first;
    for (int rep = 0; rep < 2; ++rep) {
      std::ostringstream out, err;
      const int code = cli::run_cli(cmd, out, err);
      std::string all = std::to_string(code) + out.str();
      for (const char* f : {"trials.csv", "summary.csv", "coef.csv"})
        if (std::filesystem::exists(dir / f)) all += read(dir / f);
      if (code != 0) {
        o.require(false, cmd[0] + " exited " + std::to_string(code) + ": " + err.str());
        break;
      }
      if (rep == 0) {
        first = all;
      } else if (all != first) {
        ++mismatches;
        o.require(false, cmd[0] + " output differs between runs");
      }
    }
  }
  o.note(std::to_string(commands.size()) + " subcommand invocations, " + std::to_string(mismatches) +
         " mismatches");
  std::filesystem::remove_all(dir);
#else
  o.require(false, "built without the CLI");
#endif
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "fig1 preset trend", criterion_fig1},
      {2, "fig2 preset trend", criterion_fig2},
      {3, "Robustness separation", criterion_robustness},
      {4, "Prox oracle", criterion_prox},
      {5, "Bernstein-Cauchy equivalence", criterion_bernstein},
      {6, "Rate arithmetic", criterion_rates},
      {7, "Mean-width Monte Carlo", criterion_width},
      {8, "Le Cam coupling", criterion_lecam},
      {9, "RKHS", criterion_rkhs},
      {10, "Determinism", criterion_determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failures;
    std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
