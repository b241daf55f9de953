#include "huberbench/rates.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "huberbench/conditions.hpp"
#include "huberbench/dataset_io.hpp"

namespace huberbench {

void RateInputs::validate() const {
  if (!(gamma > 0.0)) throw std::invalid_argument("rate inputs: gamma must be positive");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("rate inputs: alpha must lie in (0, 1]");
  if (n < 1) throw std::invalid_argument("rate inputs: n must be >= 1");
  if (n_outliers < 0 || 2 * n_outliers > n) {
    throw std::invalid_argument("rate inputs: need 0 <= |O| <= N/2");
  }
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("rate inputs: delta must lie in (0, 1)");
  if (!(c_abs > 0.0)) throw std::invalid_argument("rate inputs: c must be positive");
  if (trace_sigma && !(*trace_sigma > 0.0)) throw std::invalid_argument("rate inputs: trace must be positive");
  if (sparsity && *sparsity < 0) throw std::invalid_argument("rate inputs: sparsity must be >= 0");
  if (dim && *dim < 1) throw std::invalid_argument("rate inputs: dim must be >= 1");
  if (kappa && !(*kappa > 0.0)) throw std::invalid_argument("rate inputs: kappa must be positive");
}

std::string to_string(DominantTerm term) {
  switch (term) {
    case DominantTerm::Complexity: return "complexity";
    case DominantTerm::Confidence: return "confidence";
    case DominantTerm::Outliers: return "outliers";
  }
  return "unknown";
}

namespace {

void finish(TheoryReport& report) {
  // Ties resolve in the order complexity, confidence, outliers.
  std::size_t best = 0;
  for (std::size_t k = 1; k < report.terms.size(); ++k)
    if (report.terms[k] > report.terms[best]) best = k;
  report.rate = report.terms[best];
  report.dominant_term = static_cast<DominantTerm>(best);
}

void require_lasso_inputs(const RateInputs& in, const char* who) {
  if (!in.sparsity || !in.dim) throw std::invalid_argument(std::string(who) + ": sparsity and dim are required");
  if (*in.sparsity < 1) throw std::invalid_argument(std::string(who) + ": sparsity must be >= 1");
  if (*in.sparsity > *in.dim) throw std::invalid_argument(std::string(who) + ": sparsity exceeds dim");
}

std::string opt_text(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }
std::string opt_text(const std::optional<long>& v) { return v ? std::to_string(*v) : std::string(); }

}  // namespace

TheoryReport rate_erm(const RateInputs& in) {
  in.validate();
  if (!in.trace_sigma) throw std::invalid_argument("rate_erm: trace_sigma is required");
  const double n = double(in.n);
  const double scale = in.c_abs * in.gamma / in.alpha;
  TheoryReport r;
  r.formula = "erm";
  r.inputs_echo = in;
  r.terms = {scale * std::sqrt(*in.trace_sigma / n), scale * std::sqrt(std::log(1.0 / in.delta) / n),
             scale * double(in.n_outliers) / n};
  r.outlier_crossover = std::sqrt(*in.trace_sigma * n);
  finish(r);
  return r;
}

TheoryReport rate_lasso(const RateInputs& in) {
  in.validate();
  require_lasso_inputs(in, "rate_lasso");
  const double n = double(in.n);
  const double s = double(*in.sparsity);
  const double log_p = std::log(double(*in.dim));
  const double log_delta = std::log(1.0 / in.delta);
  const double o = double(in.n_outliers);
  const double scale = in.c_abs * in.gamma / in.alpha;
  TheoryReport r;
  r.formula = "lasso";
  r.inputs_echo = in;
  r.terms = {scale * std::sqrt(s * log_p / n), scale * std::sqrt(log_delta / n), scale * o / n};
  finish(r);
  const double rs = std::sqrt(s);
  r.l1_rate = std::max({scale * s * std::sqrt(log_p / n), scale * std::sqrt(s * log_delta / n), scale * rs * o / n});
  r.lambda = in.c_abs * in.gamma *
             std::max({std::sqrt(log_p / n), std::sqrt(log_delta / (s * n)), o / (rs * n)});
  r.outlier_crossover = std::sqrt(s * log_p * n);
  return r;
}

TheoryReport rate_lasso_re(const RateInputs& in) {
  in.validate();
  require_lasso_inputs(in, "rate_lasso_re");
  if (!in.kappa) throw std::invalid_argument("rate_lasso_re: kappa is required");
  const double kappa = *in.kappa;
  const double n = double(in.n);
  const double s = double(*in.sparsity);
  const double log_p = std::log(double(*in.dim));
  const double log_delta = std::log(1.0 / in.delta);
  const double o = double(in.n_outliers);
  const double scale = in.c_abs * in.gamma / in.alpha;
  TheoryReport r;
  r.formula = "lasso_re";
  r.inputs_echo = in;
  r.terms = {scale * std::sqrt(s * log_p / (kappa * kappa * n)), scale * std::sqrt(log_delta / n), scale * o / n};
  finish(r);
  const double rs = std::sqrt(s);
  r.l1_rate = (scale / kappa) *
              std::max({(s / kappa) * std::sqrt(log_p / n), std::sqrt(s * log_delta / n), rs * o / n});
  r.lambda = in.c_abs * in.gamma *
             std::max({std::sqrt(log_p / n), kappa * std::sqrt(log_delta / (s * n)), kappa * o / (rs * n)});
  r.outlier_crossover = std::sqrt(s * log_p * n) / kappa;
  return r;
}

TheoryReport rate_rkhs(const RateInputs& in) {
  in.validate();
  if (!in.decay_p) throw std::invalid_argument("rate_rkhs: decay_p is required");
  const double p = *in.decay_p;
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("rate_rkhs: decay_p must lie in (0, 1)");
  const double n = double(in.n);
  const double ratio = in.gamma / in.alpha;
  TheoryReport r;
  r.formula = "rkhs";
  r.inputs_echo = in;
  r.terms = {in.c_abs * std::pow(ratio, 1.0 / (p + 1.0)) / std::pow(n, 1.0 / (2.0 * (p + 1.0))),
             in.c_abs * ratio * std::sqrt(std::log(1.0 / in.delta) / n),
             in.c_abs * ratio * double(in.n_outliers) / n};
  finish(r);
  r.lambda = in.c_abs * in.alpha * r.rate;
  r.outlier_crossover = std::pow(in.alpha / in.gamma, p / (p + 1.0)) * std::pow(n, (2.0 * p + 1.0) / (2.0 * p + 2.0));
  return r;
}

void attach_bernstein_check(TheoryReport& report, const NoiseModel& noise, double multiplier) {
  const auto check =
      bernstein_check(noise, report.inputs_echo.gamma, report.rate, report.inputs_echo.alpha, multiplier);
  report.condition_verdicts.push_back({"bernstein(" + noise.name() + ")", check.holds, check.margin});
}

std::string TheoryReport::to_text() const {
  std::ostringstream out;
  const RateInputs& in = inputs_echo;
  out << "formula = " << formula << '\n';
  out << "rate = " << format_double(rate) << '\n';
  out << "dominant = " << to_string(dominant_term) << '\n';
  out << "term.complexity = " << format_double(terms[0]) << '\n';
  out << "term.confidence = " << format_double(terms[1]) << '\n';
  out << "term.outliers = " << format_double(terms[2]) << '\n';
  if (l1_rate) out << "l1_rate = " << format_double(*l1_rate) << '\n';
  if (lambda) out << "lambda = " << format_double(*lambda) << '\n';
  if (outlier_crossover) out << "outlier_crossover = " << format_double(*outlier_crossover) << '\n';
  out << "inputs: c=" << format_double(in.c_abs) << " gamma=" << format_double(in.gamma)
      << " alpha=" << format_double(in.alpha) << " n=" << in.n << " outliers=" << in.n_outliers
      << " delta=" << format_double(in.delta);
  if (in.trace_sigma) out << " trace=" << format_double(*in.trace_sigma);
  if (in.sparsity) out << " sparsity=" << *in.sparsity;
  if (in.dim) out << " dim=" << *in.dim;
  if (in.kappa) out << " kappa=" << format_double(*in.kappa);
  if (in.decay_p) out << " decay_p=" << format_double(*in.decay_p);
  out << '\n';
  for (const auto& v : condition_verdicts) {
    out << "condition " << v.name << ": " << (v.holds ? "holds" : "fails") << " (margin "
        << format_double(v.margin) << ")\n";
  }
  return out.str();
}

std::string TheoryReport::csv_header() {
  return "formula,c,gamma,alpha,n,outliers,delta,trace,sparsity,dim,kappa,decay_p,"
         "term_complexity,term_confidence,term_outliers,rate,dominant,l1_rate,lambda,outlier_crossover";
}

std::string TheoryReport::to_csv_row() const {
  const RateInputs& in = inputs_echo;
  std::ostringstream out;
  out << formula << ',' << format_double(in.c_abs) << ',' << format_double(in.gamma) << ','
      << format_double(in.alpha) << ',' << in.n << ',' << in.n_outliers << ',' << format_double(in.delta) << ','
      << opt_text(in.trace_sigma) << ',' << opt_text(in.sparsity) << ',' << opt_text(in.dim) << ','
      << opt_text(in.kappa) << ',' << opt_text(in.decay_p) << ',' << format_double(terms[0]) << ','
      << format_double(terms[1]) << ',' << format_double(terms[2]) << ',' << format_double(rate) << ','
      << to_string(dominant_term) << ',' << opt_text(l1_rate) << ',' << opt_text(lambda) << ','
      << opt_text(outlier_crossover);
  return out.str();
}

}  // namespace huberbench
