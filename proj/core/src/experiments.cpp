#include "huberbench/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

#include "huberbench/parallel.hpp"
#include "huberbench/rng.hpp"

namespace huberbench {

std::string estimator_name(const Estimator& estimator) {
  return std::visit(
      [](const auto& e) -> std::string {
        using E = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<E, ErmHuber>) return "erm-huber";
        if constexpr (std::is_same_v<E, L1Huber>) return "l1-huber";
        if constexpr (std::is_same_v<E, RkhsHuber>) return "rkhs-huber";
        if constexpr (std::is_same_v<E, OlsBaseline>) return "ols";
      },
      estimator);
}

void SweepConfig::validate() const {
  if (n < 1) throw std::invalid_argument("sweep config: n must be >= 1");
  if (dim < 1) throw std::invalid_argument("sweep config: dim must be >= 1");
  if (sparsity && (*sparsity < 0 || *sparsity > dim)) {
    throw std::invalid_argument("sweep config: sparsity must lie in [0, dim]");
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("sweep config: gamma must be positive");
  if (noise_models.empty()) throw std::invalid_argument("sweep config: no noise models");
  if (outlier_fractions.empty()) throw std::invalid_argument("sweep config: no outlier fractions");
  for (double f : outlier_fractions) {
    if (!(f >= 0.0 && f <= 0.5)) throw std::invalid_argument("sweep config: outlier fractions must lie in [0, 0.5]");
  }
  if (!std::is_sorted(outlier_fractions.begin(), outlier_fractions.end())) {
    throw std::invalid_argument("sweep config: outlier fractions must be sorted ascending");
  }
  if (trials < 1) throw std::invalid_argument("sweep config: trials must be >= 1");
  if (!(outlier_range.first <= outlier_range.second)) {
    throw std::invalid_argument("sweep config: outlier range must satisfy lo <= hi");
  }
  if (design && design->dim() != dim) throw std::invalid_argument("sweep config: design dimension differs from dim");
  if (const auto* l1 = std::get_if<L1Huber>(&estimator); l1 && !(l1->lambda > 0.0)) {
    throw std::invalid_argument("sweep config: l1-huber lambda must be positive");
  }
  if (const auto* rk = std::get_if<RkhsHuber>(&estimator); rk && !(rk->lambda >= 0.0)) {
    throw std::invalid_argument("sweep config: rkhs-huber lambda must be >= 0");
  }
  solver.validate();
}

GaussianDesignSpec SweepConfig::design_spec() const {
  return design ? *design : GaussianDesignSpec::identity(dim);
}

std::uint64_t cell_seed(const SweepConfig& cfg, std::size_t noise_idx, std::size_t fraction_idx, int trial) {
  const std::uint64_t f = cfg.outlier_fractions.size();
  const std::uint64_t t = static_cast<std::uint64_t>(cfg.trials);
  return derive_seed(cfg.root_seed, (noise_idx * f + fraction_idx) * t + static_cast<std::uint64_t>(trial));
}

namespace {

int outlier_count(double fraction, int n) { return static_cast<int>(std::lround(fraction * double(n))); }

SweepRow run_linear_cell(const SweepConfig& cfg, const GaussianDesignSpec& design, const NoiseModel& noise,
                         double fraction, std::uint64_t seed) {
  const int s = cfg.sparsity.value_or(cfg.dim);
  const GroundTruth truth = random_sparse_truth(cfg.dim, s, derive_seed(seed, 3));
  ContaminationSpec contamination;
  contamination.count = outlier_count(fraction, cfg.n);
  contamination.generator = UniformRange{cfg.outlier_range.first, cfg.outlier_range.second};
  contamination.seed = derive_seed(seed, 2);
  const ContaminatedDataset data = make_regression_dataset(design, truth, noise, contamination, cfg.n, seed);

  const HuberParams params(cfg.gamma);
  FitResult fit = std::visit(
      [&](const auto& e) -> FitResult {
        using E = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<E, ErmHuber>) {
          return fit_erm_huber(data, params, cfg.solver);
        } else if constexpr (std::is_same_v<E, L1Huber>) {
          return fit_l1_huber(data, params, e.lambda, cfg.solver);
        } else {
          return fit_ols(data);
        }
      },
      cfg.estimator);
  const ErrorNorms err = estimate_error(fit, truth, design);
  SweepRow row;
  row.noise = noise.name();
  row.fraction = fraction;
  row.l2_error = err.l2;
  row.l1_error = err.l1;
  row.weighted_error = err.weighted;
  row.iterations = fit.iterations;
  row.converged = fit.converged;
  return row;
}

SweepRow run_rkhs_cell(const SweepConfig& cfg, const RkhsHuber& est, const GaussianDesignSpec& design,
                       const NoiseModel& noise, double fraction, std::uint64_t seed) {
  const MatrixXd points = generate_design(design, cfg.n, derive_seed(seed, 0));
  const GramFactorization gram = gram_matrix(est.kernel, points);

  const int anchors = std::min(10, cfg.n);
  VectorXd c_star = VectorXd::Zero(cfg.n);
  Rng rng(derive_seed(seed, 3));
  std::normal_distribution<double> normal;
  for (int k = 0; k < anchors; ++k) c_star[k] = normal(rng);
  const VectorXd f_star = gram.gram * c_star;
  const VectorXd clean = f_star + sample_noise(noise, cfg.n, derive_seed(seed, 1));

  ContaminationSpec contamination;
  contamination.count = outlier_count(fraction, cfg.n);
  contamination.generator = UniformRange{cfg.outlier_range.first, cfg.outlier_range.second};
  contamination.seed = derive_seed(seed, 2);
  const InjectionResult injected = inject_outliers(clean, contamination);

  const FitResult fit = fit_rkhs_huber(gram, injected.labels, HuberParams(cfg.gamma), est.lambda, cfg.solver);
  const VectorXd diff_weights = *fit.representer_weights - c_star;
  const VectorXd diff_values = gram.gram * diff_weights;
  SweepRow row;
  row.noise = noise.name();
  row.fraction = fraction;
  row.l2_error = std::sqrt(diff_values.squaredNorm() / double(cfg.n));
  row.l1_error = diff_values.lpNorm<1>() / double(cfg.n);
  row.weighted_error = rkhs_norm(gram, diff_weights);
  row.iterations = fit.iterations;
  row.converged = fit.converged;
  return row;
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

double stderr_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / double(v.size() - 1) / double(v.size()));
}

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * double(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

SweepResult sweep_outliers(const SweepConfig& cfg) {
  cfg.validate();
  const GaussianDesignSpec design = cfg.design_spec();
  const std::size_t nf = cfg.outlier_fractions.size();
  const std::size_t cells = cfg.noise_models.size() * nf * static_cast<std::size_t>(cfg.trials);

  SweepResult result;
  result.weighted_metric = !design.is_identity() && !std::holds_alternative<RkhsHuber>(cfg.estimator);
  result.rows.resize(cells);
  // Cell index order is (noise, fraction, trial), which is also the emission order.
  parallel_for(cells, cfg.threads, [&](std::size_t idx) {
    const std::size_t trial = idx % cfg.trials;
    const std::size_t j = (idx / cfg.trials) % nf;
    const std::size_t k = idx / (cfg.trials * nf);
    const std::uint64_t seed = cell_seed(cfg, k, j, static_cast<int>(trial));
    const NoiseModel& noise = cfg.noise_models[k];
    const double fraction = cfg.outlier_fractions[j];
    SweepRow row = std::holds_alternative<RkhsHuber>(cfg.estimator)
                       ? run_rkhs_cell(cfg, std::get<RkhsHuber>(cfg.estimator), design, noise, fraction, seed)
                       : run_linear_cell(cfg, design, noise, fraction, seed);
    row.trial = static_cast<int>(trial);
    result.rows[idx] = std::move(row);
  });
  return result;
}

std::optional<LinearFit> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_line: size mismatch");
  if (x.size() < 2) return std::nullopt;
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) return std::nullopt;
  LinearFit fit;
  fit.points = static_cast<int>(x.size());
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (syy == 0.0) {
    fit.r2 = 1.0;
  } else {
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = y[i] - (fit.intercept + fit.slope * x[i]);
      sse += e * e;
    }
    fit.r2 = 1.0 - sse / syy;
  }
  return fit;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman: size mismatch");
  if (x.size() < 2) return 0.0;
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double mx = mean_of(rx);
  const double my = mean_of(ry);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
    sxy += (rx[i] - mx) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

SweepSummary summarize(const SweepResult& result, double min_fraction) {
  if (result.rows.empty()) throw std::invalid_argument("summarize: empty sweep result");
  SweepSummary summary;
  summary.weighted_metric = result.weighted_metric;
  summary.min_fraction = min_fraction;

  // Group by noise in first-seen order, then by fraction ascending.
  std::vector<std::string> noises;
  std::map<std::string, std::map<double, std::vector<const SweepRow*>>> groups;
  for (const auto& row : result.rows) {
    if (!groups.count(row.noise)) noises.push_back(row.noise);
    groups[row.noise][row.fraction].push_back(&row);
  }
  for (const auto& noise : noises) {
    std::vector<double> xs_all, ys_all, xs_fit, ys_fit;
    for (const auto& [fraction, rows] : groups[noise]) {
      std::vector<double> l2, l1, w;
      SummaryPoint pt;
      pt.noise = noise;
      pt.fraction = fraction;
      pt.trials = static_cast<int>(rows.size());
      for (const SweepRow* r : rows) {
        l2.push_back(r->l2_error);
        l1.push_back(r->l1_error);
        w.push_back(r->weighted_error);
        pt.converged += r->converged ? 1 : 0;
      }
      pt.mean_l2 = mean_of(l2);
      pt.se_l2 = stderr_of(l2, pt.mean_l2);
      pt.mean_l1 = mean_of(l1);
      pt.se_l1 = stderr_of(l1, pt.mean_l1);
      pt.mean_weighted = mean_of(w);
      pt.se_weighted = stderr_of(w, pt.mean_weighted);
      xs_all.push_back(fraction);
      ys_all.push_back(pt.mean(summary.weighted_metric));
      if (fraction >= min_fraction) {
        xs_fit.push_back(fraction);
        ys_fit.push_back(pt.mean(summary.weighted_metric));
      }
      summary.points.push_back(pt);
    }
    NoiseSummary ns;
    ns.noise = noise;
    ns.fit = fit_line(xs_fit, ys_fit);
    ns.spearman = spearman(xs_all, ys_all);
    summary.per_noise.push_back(ns);
  }
  return summary;
}

namespace {

std::vector<double> grid_fractions() {
  std::vector<double> f;
  for (int k = 0; k <= 8; ++k) f.push_back(k / 20.0);
  return f;
}

}  // namespace

SweepConfig fig1_config() {
  SweepConfig cfg;
  cfg.estimator = ErmHuber{};
  cfg.n = 1000;
  cfg.dim = 50;
  cfg.gamma = 1.0;
  cfg.noise_models = {NoiseModel::gaussian(1.0), NoiseModel::student_t(2.0), NoiseModel::cauchy(1.0)};
  cfg.outlier_fractions = grid_fractions();
  cfg.trials = 20;
  cfg.root_seed = 1;
  cfg.solver.acceleration = true;
  return cfg;
}

SweepConfig fig2_config() {
  SweepConfig cfg = fig1_config();
  cfg.estimator = L1Huber{1e-3};
  cfg.dim = 1000;
  cfg.sparsity = 50;
  cfg.trials = 10;
  cfg.solver = SolverConfig{};
  cfg.solver.method = SolverMethod::InteriorPoint;
  cfg.solver.max_iter = 200;
  cfg.solver.tol = 1e-7;
  return cfg;
}

}  // namespace huberbench
