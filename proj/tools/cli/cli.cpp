#include "cli.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "huberbench/complexity.hpp"
#include "huberbench/conditions.hpp"
#include "huberbench/data.hpp"
#include "huberbench/dataset_io.hpp"
#include "huberbench/experiments.hpp"
#include "huberbench/kernel.hpp"
#include "huberbench/lecam.hpp"
#include "huberbench/rates.hpp"
#include "huberbench/report.hpp"
#include "huberbench/solvers.hpp"

namespace huberbench::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string yes_no(bool b) { return b ? "true" : "false"; }

// ---------------------------------------------------------------- shared

struct SolverOpts {
  std::string method = "pg";
  int max_iter = 20000;
  double tol = 1e-8;
  std::string step = "fixed";
  double beta = 0.5;
  bool acceleration = false;

  void add(CLI::App* app) {
    app->add_option("--method", method, "pg (proximal gradient) or ipm (interior point, l1 only)")
        ->check(CLI::IsMember({"pg", "ipm"}))
        ->capture_default_str();
    app->add_option("--max-iter", max_iter, "Iteration cap")->capture_default_str();
    app->add_option("--tol", tol, "Stationarity tolerance")->capture_default_str();
    app->add_option("--step", step, "Step rule")->check(CLI::IsMember({"fixed", "backtracking"}))->capture_default_str();
    app->add_option("--beta", beta, "Backtracking shrink factor")->capture_default_str();
    app->add_flag("--acceleration", acceleration, "Monotone FISTA with restart");
  }
  SolverConfig config() const {
    SolverConfig cfg;
    cfg.method = method == "ipm" ? SolverMethod::InteriorPoint : SolverMethod::ProximalGradient;
    cfg.max_iter = max_iter;
    cfg.tol = tol;
    cfg.acceleration = acceleration;
    if (step == "backtracking") {
      cfg.step_rule = Backtracking{beta};
    } else {
      cfg.step_rule = FixedFromLipschitz{};
    }
    return cfg;
  }
};

struct KernelOpts {
  std::string kind = "rbf";
  double bandwidth = 1.0;
  int degree = 2;
  double offset = 1.0;

  void add(CLI::App* app) {
    app->add_option("--kernel", kind, "Kernel family")->check(CLI::IsMember({"rbf", "poly"}))->capture_default_str();
    app->add_option("--bandwidth", bandwidth, "RBF bandwidth h")->capture_default_str();
    app->add_option("--degree", degree, "Polynomial degree")->capture_default_str();
    app->add_option("--offset", offset, "Polynomial offset")->capture_default_str();
  }
  Kernel kernel() const {
    if (kind == "poly") return Kernel::polynomial(degree, offset);
    return Kernel::rbf(bandwidth);
  }
};

struct DesignOpts {
  std::string kind = "identity";
  double rho = 0.5;

  void add(CLI::App* app) {
    app->add_option("--design", kind, "Design covariance")
        ->check(CLI::IsMember({"identity", "toeplitz"}))
        ->capture_default_str();
    app->add_option("--design-rho", rho, "Toeplitz correlation rho in Sigma_ij = rho^|i-j|")->capture_default_str();
  }
  GaussianDesignSpec spec(int dim) const {
    if (kind == "toeplitz") return GaussianDesignSpec::toeplitz(dim, rho);
    return GaussianDesignSpec::identity(dim);
  }
};

MatrixXd read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& cell : split_csv_line(line)) {
      row.push_back(parse_double(trim(cell), path + " line " + std::to_string(line_no)));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::runtime_error(path + " line " + std::to_string(line_no) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("'" + path + "' holds no matrix rows");
  MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

// ---------------------------------------------------------------- fit

struct FitCmd {
  std::string data;
  std::string estimator = "erm";
  double gamma = 1.0;
  double lambda = 1e-3;
  std::string output;
  SolverOpts solver;
  KernelOpts kernel;

  void add(CLI::App* app) {
    app->add_option("--data", data, "Dataset CSV (x_1..x_p,y[,is_outlier])")->required();
    app->add_option("--estimator", estimator, "Estimator")
        ->check(CLI::IsMember({"erm", "l1", "rkhs", "ols"}))
        ->capture_default_str();
    app->add_option("--gamma", gamma, "Huber threshold")->capture_default_str();
    app->add_option("--lambda", lambda, "Penalty level (l1, rkhs)")->capture_default_str();
    app->add_option("--output", output, "Write coefficients CSV here instead of stdout");
    solver.add(app);
    kernel.add(app);
  }

  void run(std::ostream& out) const {
    const ContaminatedDataset ds = load_dataset_csv(std::filesystem::path(data));
    const SolverConfig cfg = solver.config();
    FitResult fit;
    std::string name;
    if (estimator == "erm") {
      fit = fit_erm_huber(ds, HuberParams(gamma), cfg);
      name = "erm-huber";
    } else if (estimator == "l1") {
      fit = fit_l1_huber(ds, HuberParams(gamma), lambda, cfg);
      name = "l1-huber";
    } else if (estimator == "ols") {
      fit = fit_ols(ds);
      name = "ols";
    } else {
      fit = fit_rkhs_huber(ds.design, ds.labels, kernel.kernel(), HuberParams(gamma), lambda, cfg);
      name = "rkhs-huber";
    }
    out << "estimator = " << name << '\n';
    out << "n = " << ds.n() << '\n';
    out << "dim = " << ds.dim() << '\n';
    out << "converged = " << yes_no(fit.converged) << '\n';
    out << "iterations = " << fit.iterations << '\n';
    out << "stationarity = " << format_double(fit.stationarity_residual) << '\n';
    if (!fit.objective_trace.empty()) out << "objective = " << format_double(fit.objective_trace.back()) << '\n';
    out << "non_unique = " << yes_no(fit.non_unique) << '\n';

    const VectorXd& coef = fit.representer_weights ? *fit.representer_weights : fit.coefficients;
    const std::string column = fit.representer_weights ? "alpha" : "coefficient";
    auto write = [&](std::ostream& o) {
      o << "index," << column << '\n';
      for (Eigen::Index i = 0; i < coef.size(); ++i) o << i << ',' << format_double(coef[i]) << '\n';
    };
    if (output.empty()) {
      write(out);
    } else {
      std::ofstream f(output);
      if (!f) throw std::runtime_error("cannot open '" + output + "' for writing");
      write(f);
      if (!f) throw std::runtime_error("write to '" + output + "' failed");
      out << "coefficients written to " << output << '\n';
    }
  }
};

// ---------------------------------------------------------------- sweep

struct SweepCmd {
  std::string preset = "fig1";
  std::string estimator = "erm";
  int n = 0, dim = 0, sparsity = 0, trials = 0;
  double gamma = 1.0, lambda = 1e-3, outlier_lo = -1e5, outlier_hi = 1e5, min_fraction = 0.05;
  std::string noise, fractions;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string trials_csv, summary_csv, svg, title;
  SolverOpts solver;
  KernelOpts kernel;
  DesignOpts design;
  CLI::App* app = nullptr;

  void add(CLI::App* a) {
    app = a;
    a->add_option("--preset", preset, "Starting configuration; other flags override it")
        ->check(CLI::IsMember({"fig1", "fig2"}))
        ->capture_default_str();
    a->add_option("--estimator", estimator, "Estimator")->check(CLI::IsMember({"erm", "l1", "rkhs", "ols"}));
    a->add_option("--n", n, "Sample size");
    a->add_option("--dim", dim, "Dimension p");
    a->add_option("--sparsity", sparsity, "Nonzeros of t*");
    a->add_option("--gamma", gamma, "Huber threshold");
    a->add_option("--lambda", lambda, "Penalty level (l1, rkhs)");
    a->add_option("--noise", noise, "Comma-separated noise models, e.g. gaussian:1,student_t:2,cauchy:1");
    a->add_option("--fractions", fractions, "Comma-separated outlier fractions, ascending");
    a->add_option("--trials", trials, "Trials per cell");
    a->add_option("--seed", seed, "Root seed")->envname("HUBERBENCH_SEED");
    a->add_option("--outlier-lo", outlier_lo, "Lower end of the uniform outlier range");
    a->add_option("--outlier-hi", outlier_hi, "Upper end of the uniform outlier range");
    a->add_option("--threads", threads, "Worker threads")->capture_default_str();
    a->add_option("--min-fraction", min_fraction, "Smallest fraction in the linear fit")->capture_default_str();
    a->add_option("--trials-csv", trials_csv, "Per-trial CSV output");
    a->add_option("--summary-csv", summary_csv, "Per-cell summary CSV output");
    a->add_option("--svg", svg, "SVG chart output");
    a->add_option("--title", title, "Chart title");
    solver.add(a);
    kernel.add(a);
    design.add(a);
  }

  bool given(const std::string& name) const { return app->get_option(name)->count() > 0; }

  SweepConfig config() const {
    SweepConfig cfg = preset == "fig2" ? fig2_config() : fig1_config();
    if (given("--estimator")) {
      if (estimator == "erm") cfg.estimator = ErmHuber{};
      if (estimator == "l1") cfg.estimator = L1Huber{lambda};
      if (estimator == "ols") cfg.estimator = OlsBaseline{};
      if (estimator == "rkhs") cfg.estimator = RkhsHuber{kernel.kernel(), lambda};
    } else if (given("--lambda")) {
      if (auto* l1 = std::get_if<L1Huber>(&cfg.estimator)) l1->lambda = lambda;
    }
    if (given("--n")) cfg.n = n;
    if (given("--dim")) {
      cfg.dim = dim;
      if (cfg.sparsity && *cfg.sparsity > dim) cfg.sparsity = dim;
    }
    if (given("--sparsity")) cfg.sparsity = sparsity;
    if (given("--gamma")) cfg.gamma = gamma;
    if (given("--noise")) {
      cfg.noise_models.clear();
      for (const auto& item : split_list(noise)) cfg.noise_models.push_back(NoiseModel::parse(item));
    }
    if (given("--fractions")) {
      cfg.outlier_fractions.clear();
      for (const auto& item : split_list(fractions)) cfg.outlier_fractions.push_back(parse_double(item, "--fractions"));
    }
    if (given("--trials")) cfg.trials = trials;
    if (given("--seed")) cfg.root_seed = seed;
    if (given("--outlier-lo")) cfg.outlier_range.first = outlier_lo;
    if (given("--outlier-hi")) cfg.outlier_range.second = outlier_hi;
    if (given("--design")) cfg.design = design.spec(cfg.dim);
    cfg.threads = threads;
    if (given("--method")) cfg.solver.method = solver.config().method;
    if (given("--max-iter")) cfg.solver.max_iter = solver.max_iter;
    if (given("--tol")) cfg.solver.tol = solver.tol;
    if (given("--acceleration")) cfg.solver.acceleration = solver.acceleration;
    if (given("--step")) cfg.solver.step_rule = solver.config().step_rule;
    return cfg;
  }

  void run(std::ostream& out) const {
    const SweepConfig cfg = config();
    const SweepResult result = sweep_outliers(cfg);
    const SweepSummary summary = summarize(result, min_fraction);
    OutputPaths paths;
    if (!trials_csv.empty()) paths.trials_csv = trials_csv;
    if (!summary_csv.empty()) paths.summary_csv = summary_csv;
    if (!svg.empty()) paths.svg = svg;
    emit_outputs(result, &summary, paths,
                 title.empty() ? estimator_name(cfg.estimator) + ": error vs. outlier fraction" : title);

    long converged = 0;
    for (const auto& r : result.rows) converged += r.converged ? 1 : 0;
    out << "estimator = " << estimator_name(cfg.estimator) << '\n';
    out << "rows = " << result.rows.size() << '\n';
    out << "converged = " << converged << '\n';
    out << "metric = " << (summary.weighted_metric ? "weighted" : "l2") << '\n';
    out << "noise,fraction,mean,se\n";
    for (const auto& p : summary.points) {
      out << p.noise << ',' << format_double(p.fraction) << ',' << format_double(p.mean(summary.weighted_metric))
          << ',' << format_double(p.se(summary.weighted_metric)) << '\n';
    }
    for (const auto& ns : summary.per_noise) {
      out << "trend " << ns.noise << ": spearman = " << format_double(ns.spearman);
      if (ns.fit) {
        out << " slope = " << format_double(ns.fit->slope) << " intercept = " << format_double(ns.fit->intercept)
            << " r2 = " << format_double(ns.fit->r2);
      } else {
        out << " (fit omitted: fewer than two fractions >= " << format_double(min_fraction) << ")";
      }
      out << '\n';
    }
  }
};

// ---------------------------------------------------------------- rates

struct RatesCmd {
  RateInputs in;
  double trace = 0.0, kappa = 0.0, decay_p = 0.0;
  long sparsity = 0, dim = 0;
  std::string noise;
  double multiplier = 18.0;
  std::string format = "text";
  std::string formula;

  void add(CLI::App* app, const std::string& name) {
    formula = name;
    app->add_option("--gamma", in.gamma, "Huber threshold")->capture_default_str();
    app->add_option("--alpha", in.alpha, "Bernstein mass alpha in (0, 1]")->capture_default_str();
    app->add_option("--n", in.n, "Sample size N")->required();
    app->add_option("--outliers", in.n_outliers, "|O|")->capture_default_str();
    app->add_option("--delta", in.delta, "Failure probability")->capture_default_str();
    app->add_option("--c", in.c_abs, "Absolute constant")->capture_default_str();
    if (name == "erm") app->add_option("--trace", trace, "Tr(Sigma)")->required();
    if (name == "lasso" || name == "lasso-re") {
      app->add_option("--sparsity", sparsity, "s")->required();
      app->add_option("--dim", dim, "p")->required();
    }
    if (name == "lasso-re") app->add_option("--kappa", kappa, "RE constant")->required();
    if (name == "rkhs") app->add_option("--decay-p", decay_p, "Spectrum decay exponent p in (0, 1)")->required();
    app->add_option("--noise", noise, "Attach a Bernstein check for this noise model");
    app->add_option("--multiplier", multiplier, "Bernstein multiplier m")->capture_default_str();
    app->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "csv"}))->capture_default_str();
  }

  void run(std::ostream& out) const {
    RateInputs r = in;
    TheoryReport report;
    if (formula == "erm") {
      r.trace_sigma = trace;
      report = rate_erm(r);
    } else if (formula == "lasso") {
      r.sparsity = sparsity;
      r.dim = dim;
      report = rate_lasso(r);
    } else if (formula == "lasso-re") {
      r.sparsity = sparsity;
      r.dim = dim;
      r.kappa = kappa;
      report = rate_lasso_re(r);
    } else {
      r.decay_p = decay_p;
      report = rate_rkhs(r);
    }
    if (!noise.empty()) attach_bernstein_check(report, NoiseModel::parse(noise), multiplier);
    if (format == "csv") {
      out << TheoryReport::csv_header() << '\n' << report.to_csv_row() << '\n';
    } else {
      out << report.to_text();
    }
  }
};

// ---------------------------------------------------------------- bernstein

struct BernsteinCmd {
  std::string noise;
  double gamma = 1.0, r = 0.0, alpha = 0.5, multiplier = 18.0;

  void add(CLI::App* app) {
    app->add_option("--noise", noise, "Noise model, e.g. cauchy:1")->required();
    app->add_option("--gamma", gamma, "Huber threshold")->capture_default_str();
    app->add_option("--r", r, "Radius r")->capture_default_str();
    app->add_option("--alpha", alpha, "Required central mass")->capture_default_str();
    app->add_option("--multiplier", multiplier, "Multiplier m in F(gamma - m r)")->capture_default_str();
  }

  void run(std::ostream& out) const {
    const NoiseModel model = NoiseModel::parse(noise);
    const BernsteinCheck check = bernstein_check(model, gamma, r, alpha, multiplier);
    out << "noise = " << model.name() << '\n';
    out << "holds = " << yes_no(check.holds) << '\n';
    out << "margin = " << format_double(check.margin) << '\n';
  }
};

// ---------------------------------------------------------------- complexity

struct ComplexityCmd {
  std::string set = "l2";
  std::string mode = "width";
  double radius = 1.0, r = 1.0, rho = 1.0;
  int dim = 10, n = 100;
  long samples = 2000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool fixed_point = false;
  double a = 1.0, lipschitz = 1.0, c = 1.0;
  DesignOpts design;

  void add(CLI::App* app) {
    app->add_option("--set", set, "Index set")
        ->check(CLI::IsMember({"l2", "l1", "intersection", "ellipsoid"}))
        ->capture_default_str();
    app->add_option("--mode", mode, "Gaussian mean width or Rademacher complexity")
        ->check(CLI::IsMember({"width", "rademacher"}))
        ->capture_default_str();
    app->add_option("--radius", radius, "Radius of l2, l1 or ellipsoid sets")->capture_default_str();
    app->add_option("--r", r, "l2 radius of the intersection")->capture_default_str();
    app->add_option("--rho", rho, "l1 radius of the intersection")->capture_default_str();
    app->add_option("--dim", dim, "Dimension")->capture_default_str();
    app->add_option("--n", n, "Sample size (Rademacher mode and fixed point)")->capture_default_str();
    app->add_option("--samples", samples, "Monte Carlo draws")->capture_default_str();
    app->add_option("--seed", seed, "Seed")->envname("HUBERBENCH_SEED");
    app->add_option("--threads", threads, "Worker threads")->capture_default_str();
    app->add_flag("--fixed-point", fixed_point,
                  "Also solve A L comp(r) <= c sqrt(n) r^2 (width) or <= c n r^2 (rademacher), with the set's "
                  "radius (the l2 radius for the intersection) replaced by r");
    app->add_option("--A", a, "Bernstein constant A")->capture_default_str();
    app->add_option("--L", lipschitz, "Lipschitz constant L")->capture_default_str();
    app->add_option("--c", c, "Absolute constant c")->capture_default_str();
    design.add(app);
  }

  SetSpec make_set(double scale, const GaussianDesignSpec& spec) const {
    if (set == "l2") return L2Ball{scale};
    if (set == "l1") return L1Ball{scale};
    if (set == "intersection") return BallIntersection{scale, rho};
    return EllipsoidImage{spec.sqrt_covariance(), scale};
  }

  McEstimate estimate(const SetSpec& s, const GaussianDesignSpec& spec) const {
    if (mode == "rademacher") return rademacher_mc(spec, s, n, samples, seed, threads);
    return gaussian_mean_width_mc(s, dim, samples, seed, threads);
  }

  void run(std::ostream& out) const {
    const GaussianDesignSpec spec = design.spec(dim);
    const double base = set == "intersection" ? r : radius;
    const McEstimate est = estimate(make_set(base, spec), spec);
    out << "set = " << set << '\n';
    out << "mode = " << mode << '\n';
    out << "estimate = " << format_double(est.estimate) << '\n';
    out << "std_error = " << format_double(est.std_error) << '\n';
    out << "samples = " << est.samples << '\n';
    if (fixed_point) {
      const auto comp = [&](double scale) { return estimate(make_set(scale, spec), spec).estimate; };
      const ComplexityMode cm = mode == "rademacher" ? ComplexityMode::Bounded : ComplexityMode::SubGaussian;
      out << "fixed_point_radius = " << format_double(fixed_point_radius(comp, a, lipschitz, n, cm, c)) << '\n';
    }
  }
};

// ---------------------------------------------------------------- re-check

struct ReCheckCmd {
  int dim = 10, s = 2, samples = 200;
  double c0 = 9.0;
  std::uint64_t seed = 0;
  std::string sigma_file;
  std::optional<double> r, rho;
  DesignOpts design;

  void add(CLI::App* app) {
    app->add_option("--dim", dim, "Dimension (built-in designs)")->capture_default_str();
    app->add_option("--sigma-file", sigma_file, "Covariance matrix CSV (no header); overrides --design");
    app->add_option("--s", s, "Support size")->capture_default_str();
    app->add_option("--c0", c0, "Cone constant")->capture_default_str();
    app->add_option("--samples", samples, "Random cone directions per support")->capture_default_str();
    app->add_option("--seed", seed, "Seed")->envname("HUBERBENCH_SEED");
    app->add_option("--r", r, "Radius r for the sparsity equation");
    app->add_option("--rho", rho, "Radius rho for the sparsity equation");
    design.add(app);
  }

  void run(std::ostream& out) const {
    const MatrixXd sigma = sigma_file.empty() ? design.spec(dim).covariance() : read_matrix_csv(sigma_file);
    const ReEstimate est = re_constant_estimate(sigma, s, c0, samples, seed);
    out << "kappa_hat = " << format_double(est.kappa_hat) << '\n';
    out << "kappa_hat_is = upper bound (smallest ratio found, not a certificate)\n";
    out << "supports_examined = " << est.supports_examined << '\n';
    out << "sampled_supports = " << yes_no(est.sampled_supports) << '\n';
    out << "witness_support =";
    for (int j : est.witness_support) out << ' ' << j;
    out << '\n';
    if (r && rho) {
      const SparsityCheck sc = sparsity_equation_check(s, *rho, *r, est.kappa_hat);
      out << "sparsity_equation(kappa_hat) = " << (sc.holds ? "holds" : "fails") << " (max s "
          << format_double(sc.max_sparsity) << ")\n";
      out << "width_bound = " << format_double(non_isotropic_width_bound(static_cast<int>(sigma.rows()), *r, *rho))
          << '\n';
    }
  }
};

// ---------------------------------------------------------------- spectrum

struct SpectrumCmd {
  int n = 400, dim = 1, k_min = 1, k_max = 0;
  std::uint64_t seed = 0;
  std::string data;
  KernelOpts kernel;
  DesignOpts design;

  void add(CLI::App* app) {
    app->add_option("--n", n, "Number of sample points")->capture_default_str();
    app->add_option("--dim", dim, "Point dimension")->capture_default_str();
    app->add_option("--seed", seed, "Seed")->envname("HUBERBENCH_SEED");
    app->add_option("--data", data, "Use the design columns of this dataset CSV as points");
    app->add_option("--k-min", k_min, "First eigenvalue index in the fit (1-based)")->capture_default_str();
    app->add_option("--k-max", k_max, "Last eigenvalue index in the fit (0 = all)")->capture_default_str();
    kernel.add(app);
    design.add(app);
  }

  void run(std::ostream& out) const {
    MatrixXd points;
    if (!data.empty()) {
      points = load_dataset_csv(std::filesystem::path(data)).design;
    } else {
      points = generate_design(design.spec(dim), n, seed);
    }
    const Kernel k = kernel.kernel();
    if (std::holds_alternative<PolynomialKernel>(k.kind())) {
      for (Eigen::Index i = 0; i < points.rows(); ++i) {
        const double norm = points.row(i).norm();
        if (norm > 1.0) points.row(i) /= norm;
      }
    }
    const GramFactorization fac = gram_matrix(k, points);
    const SpectrumFit fit = estimate_spectrum_decay(fac, static_cast<int>(points.rows()), {k_min, k_max});
    out << "n = " << points.rows() << '\n';
    out << "trace = " << format_double(fac.eigenvalues.sum() / double(points.rows())) << '\n';
    out << "indefinite = " << yes_no(fac.indefinite) << '\n';
    out << "p_hat = " << format_double(fit.p_hat) << '\n';
    out << "slope = " << format_double(fit.slope) << '\n';
    out << "intercept = " << format_double(fit.intercept) << '\n';
    out << "r2 = " << format_double(fit.r2) << '\n';
    out << "points_used = " << fit.points_used << '\n';
    out << "in_assumption_range = " << yes_no(fit.in_assumption_range) << '\n';
  }
};

// ---------------------------------------------------------------- lecam

Rational parse_rational(const std::string& raw) {
  const std::string text = trim(raw);
  auto digits = [](const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char ch) { return ch >= '0' && ch <= '9'; });
  };
  // cpp_int reads a leading 0 as octal.
  auto decimal = [](const std::string& s) {
    boost::multiprecision::cpp_int v = 0;
    for (char ch : s) v = v * 10 + (ch - '0');
    return v;
  };
  if (const auto slash = text.find('/'); slash != std::string::npos) {
    const std::string num = text.substr(0, slash), den = text.substr(slash + 1);
    if (!digits(num) || !digits(den)) throw UsageError("bad probability '" + raw + "'");
    const boost::multiprecision::cpp_int d = decimal(den);
    if (d == 0) throw UsageError("zero denominator in '" + raw + "'");
    return Rational(decimal(num), d);
  }
  const auto dot = text.find('.');
  const std::string whole = dot == std::string::npos ? text : text.substr(0, dot);
  const std::string frac = dot == std::string::npos ? "" : text.substr(dot + 1);
  if ((!whole.empty() && !digits(whole)) || (!frac.empty() && !digits(frac)) || (whole.empty() && frac.empty())) {
    throw UsageError("bad probability '" + raw + "'");
  }
  boost::multiprecision::cpp_int den = 1;
  for (std::size_t k = 0; k < frac.size(); ++k) den *= 10;
  return Rational(decimal(whole + frac), den);
}

std::string rational_text(const Rational& q) {
  std::ostringstream o;
  o << q << " (" << format_double(static_cast<double>(q)) << ")";
  return o.str();
}

void print_joint(std::ostream& out, const std::string& label, const std::vector<Rational>& probs) {
  out << label << " =";
  for (const auto& p : probs) out << ' ' << p;
  out << '\n';
}

struct LecamCmd {
  bool demo = false;
  std::string p1, p2;
  int nx = 1;

  void add(CLI::App* app) {
    app->add_flag("--demo", demo, "Run the built-in two-atom pair");
    app->add_option("--p1", p1, "Comma-separated probabilities of P1 (row-major, decimals or a/b)");
    app->add_option("--p2", p2, "Comma-separated probabilities of P2");
    app->add_option("--nx", nx, "Number of design atoms (rows)")->capture_default_str();
  }

  void run(std::ostream& out) const {
    DiscreteJoint<Rational> a, b;
    if (demo) {
      std::tie(a, b) = demo_pair();
    } else {
      if (p1.empty() || p2.empty()) throw UsageError("lecam: pass --demo or both --p1 and --p2");
      std::vector<Rational> v1, v2;
      for (const auto& s : split_list(p1)) v1.push_back(parse_rational(s));
      for (const auto& s : split_list(p2)) v2.push_back(parse_rational(s));
      if (nx < 1 || v1.size() % nx != 0) throw UsageError("lecam: probability count is not a multiple of --nx");
      const std::size_t ny = v1.size() / nx;
      a.support_x.resize(nx);
      b.support_x.resize(nx);
      for (int i = 0; i < nx; ++i) a.support_x[i] = b.support_x[i] = i;
      a.support_y.resize(ny);
      for (std::size_t j = 0; j < ny; ++j) a.support_y[j] = double(j);
      b.support_y = a.support_y;
      a.probs = v1;
      b.probs = v2;
    }
    const auto pair = lecam_contamination_pair(a, b);
    const auto check = verify_mixture_identity(a, b, pair.eps_prime, pair.q1, pair.q2);
    print_joint(out, "p1", a.probs);
    print_joint(out, "p2", b.probs);
    out << "tv = " << rational_text(pair.tv) << '\n';
    out << "eps_prime = " << rational_text(pair.eps_prime) << '\n';
    print_joint(out, "q1", pair.q1.probs);
    print_joint(out, "q2", pair.q2.probs);
    print_joint(out, "mixture", mixture(a, pair.q1, pair.eps_prime));
    out << "identity_holds = " << yes_no(check.holds) << '\n';
    out << "max_discrepancy = " << format_double(check.max_discrepancy) << '\n';
    out << "q_preserves_x_marginal = " << yes_no(pair.preserves_input_marginal) << '\n';
  }
};

// ---------------------------------------------------------------- config file

std::string normalize_key(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

std::vector<ConfigEntry> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  std::vector<ConfigEntry> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    ConfigEntry e{normalize_key(trim(line.substr(0, eq))), trim(line.substr(eq + 1)), line_no};
    if (e.key.empty()) throw UsageError(path + ":" + std::to_string(line_no) + ": empty key");
    entries.push_back(std::move(e));
  }
  return entries;
}

}  // namespace

std::vector<std::string> config_file_tokens(const std::string& path) {
  std::vector<std::string> tokens;
  for (const auto& e : read_config(path)) tokens.push_back("--" + e.key + "=" + e.value);
  return tokens;
}

int run_cli(const std::vector<std::string>& input, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust Huber regression toolkit: estimators, theory rates, diagnostics and sweeps.", "huberbench"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  std::string config_path_doc;
  app.add_option("--config", config_path_doc,
                 "File of 'key = value' lines applied to the subcommand before its flags ('#' comments)");

  FitCmd fit;
  SweepCmd sweep;
  std::map<std::string, RatesCmd> rates;
  BernsteinCmd bernstein;
  ComplexityCmd complexity;
  ReCheckCmd re_check;
  SpectrumCmd spectrum;
  LecamCmd lecam;

  fit.add(app.add_subcommand("fit", "Fit one estimator on a dataset CSV"));
  sweep.add(app.add_subcommand("sweep", "Error vs. outlier fraction sweep with CSV/SVG output"));
  CLI::App* rates_app = app.add_subcommand("rates", "Theoretical rate formulas");
  rates_app->require_subcommand(1);
  for (const std::string name : {"erm", "lasso", "lasso-re", "rkhs"}) {
    rates[name].add(rates_app->add_subcommand(name, "Rate for the " + name + " estimator"), name);
  }
  bernstein.add(app.add_subcommand("bernstein", "Local Bernstein condition check"));
  complexity.add(app.add_subcommand("complexity", "Monte Carlo mean width / Rademacher complexity and fixed point"));
  re_check.add(app.add_subcommand("re-check", "Restricted eigenvalue search and sparsity equation"));
  spectrum.add(app.add_subcommand("spectrum", "Kernel Gram spectrum decay fit"));
  lecam.add(app.add_subcommand("lecam", "Le Cam contamination coupling on discrete laws"));

  // Pull out --config, then splice its entries in right after the subcommand
  // path so that explicit flags (which come later) take precedence.
  std::vector<std::string> args;
  std::optional<std::string> config_path;
  for (std::size_t i = 0; i < input.size(); ++i) {
    const std::string& tok = input[i];
    if (tok == "--config") {
      if (i + 1 >= input.size()) {
        err << "error: --config needs a path\n" << app.help();
        return kExitUsage;
      }
      config_path = input[++i];
    } else if (tok.rfind("--config=", 0) == 0) {
      config_path = tok.substr(9);
    } else {
      args.push_back(tok);
    }
  }

  CLI::App* leaf = &app;
  std::size_t insert_at = 0;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i].empty() || args[i][0] == '-') continue;
    if (CLI::App* sub = leaf->get_subcommand_no_throw(args[i])) {
      leaf = sub;
      insert_at = i + 1;
    }
  }

  try {
    if (config_path) {
      if (leaf == &app) throw UsageError("--config needs a subcommand");
      std::vector<std::string> tokens;
      for (const auto& e : read_config(*config_path)) {
        if (leaf->get_option_no_throw("--" + e.key) == nullptr) {
          throw UsageError("unknown config key '" + e.key + "' (" + *config_path + ":" + std::to_string(e.line) +
                           ") for subcommand '" + leaf->get_name() + "'");
        }
        tokens.push_back("--" + e.key + "=" + e.value);
      }
      args.insert(args.begin() + static_cast<std::ptrdiff_t>(insert_at), tokens.begin(), tokens.end());
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n' << leaf->help();
    return kExitUsage;
  }

  std::vector<const char*> argv{"huberbench"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << leaf->help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (!args.empty()) err << "error: " << e.what() << '\n';
    err << leaf->help();
    return kExitUsage;
  }

  try {
    if (app.got_subcommand("fit")) fit.run(out);
    else if (app.got_subcommand("sweep")) sweep.run(out);
    else if (app.got_subcommand("rates")) {
      for (auto& [name, cmd] : rates)
        if (rates_app->got_subcommand(name)) cmd.run(out);
    } else if (app.got_subcommand("bernstein")) bernstein.run(out);
    else if (app.got_subcommand("complexity")) complexity.run(out);
    else if (app.got_subcommand("re-check")) re_check.run(out);
    else if (app.got_subcommand("spectrum")) spectrum.run(out);
    else if (app.got_subcommand("lecam")) lecam.run(out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace huberbench::cli
