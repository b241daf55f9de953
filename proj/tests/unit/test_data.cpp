#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "huberbench/data.hpp"
#include "huberbench/dataset_io.hpp"
#include "huberbench/rng.hpp"

using namespace huberbench;

namespace {

double ks_against_mirror(VectorXd x) {
  std::vector<double> a(x.data(), x.data() + x.size());
  std::vector<double> b(a.size());
  std::transform(a.begin(), a.end(), b.begin(), [](double v) { return -v; });
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  const double n = double(a.size());
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= t) ++i;
    while (j < b.size() && b[j] <= t) ++j;
    d = std::max(d, std::abs(double(i) / n - double(j) / n));
  }
  return d;
}

double median(VectorXd v) {
  std::vector<double> s(v.data(), v.data() + v.size());
  std::nth_element(s.begin(), s.begin() + s.size() / 2, s.end());
  return s[s.size() / 2];
}

}  // namespace

TEST_CASE("seed derivation") {
  CHECK(derive_seed(5, 3) == mix64(8));
  CHECK(derive_seed(5, 3) != derive_seed(5, 4));
  CHECK(mix64(0) != 0);
}

TEST_CASE("design covariance validation") {
  MatrixXd asym(2, 2);
  asym << 1, 0.5, 0.1, 1;
  CHECK_THROWS_AS(GaussianDesignSpec::from_covariance(asym), std::invalid_argument);
  MatrixXd indef(2, 2);
  indef << 1, 2, 2, 1;
  CHECK_THROWS_AS(GaussianDesignSpec::from_covariance(indef), std::invalid_argument);
  CHECK(GaussianDesignSpec::toeplitz(4, 0.5).trace() == doctest::Approx(4.0));
  CHECK(GaussianDesignSpec::identity(7).is_identity());
  const auto t = GaussianDesignSpec::toeplitz(3, 0.5);
  CHECK(t.covariance()(0, 2) == doctest::Approx(0.25));
  CHECK((t.sqrt_covariance() * t.sqrt_covariance() - t.covariance()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("generate_design sample covariance") {
  const MatrixXd x = generate_design(GaussianDesignSpec::identity(5), 100000, 3);
  const MatrixXd cov = x.transpose() * x / double(x.rows());
  CHECK((cov - MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() < 0.05);

  VectorXd var(1);
  var << 4.0;
  const MatrixXd y = generate_design(GaussianDesignSpec::diagonal(var), 100000, 4);
  CHECK(y.col(0).squaredNorm() / 100000.0 == doctest::Approx(4.0).epsilon(0.025));

  const MatrixXd empty = generate_design(GaussianDesignSpec::identity(3), 0, 1);
  CHECK(empty.rows() == 0);
  CHECK(empty.cols() == 3);
}

TEST_CASE("noise models") {
  const VectorXd c = sample_noise(NoiseModel::cauchy(1.0), 100001, 5);
  CHECK(std::abs(median(c)) < 0.05);
  const VectorXd g = sample_noise(NoiseModel::gaussian(2.0), 100000, 6);
  const double mean = g.mean();
  CHECK((g.array() - mean).square().sum() / 99999.0 == doctest::Approx(4.0).epsilon(0.025));

  for (const auto& m : {NoiseModel::gaussian(1.0), NoiseModel::student_t(2.0), NoiseModel::cauchy(1.0)}) {
    CAPTURE(m.name());
    // Two-sample KS at level 0.001: 1.95 sqrt(2 / n).
    CHECK(ks_against_mirror(sample_noise(m, 20000, 9)) < 1.95 * std::sqrt(2.0 / 20000.0));
    for (double t : {0.0, 0.3, 1.0, 2.5, 10.0}) CHECK(std::abs(m.cdf(t) + m.cdf(-t) - 1.0) <= 1e-12);
    CHECK(NoiseModel::parse(m.name()) == m);
  }
  CHECK(NoiseModel::cauchy(1.0).cdf(1.0) == doctest::Approx(0.75));
  CHECK(NoiseModel::gaussian(1.0).cdf(1.0) == doctest::Approx(0.8413447460685429));
  // Student-t(2): F(t) = 1/2 + t / (2 sqrt(2 + t^2)).
  CHECK(NoiseModel::student_t(2.0).cdf(1.5) == doctest::Approx(0.5 + 1.5 / (2.0 * std::sqrt(4.25))).epsilon(1e-12));
  CHECK_THROWS(NoiseModel::parse("laplace:1"));
  CHECK_THROWS(NoiseModel::gaussian(0.0));
}

TEST_CASE("inject_outliers") {
  const VectorXd labels = VectorXd::LinSpaced(1000, -1.0, 1.0);
  ContaminationSpec none;
  const auto r0 = inject_outliers(labels, none);
  CHECK(r0.labels == labels);
  CHECK(r0.outlier_idx.empty());

  ContaminationSpec all;
  all.count = 1000;
  all.generator = ConstantShift{7.0};
  const auto rall = inject_outliers(labels, all);
  CHECK(rall.outlier_idx.size() == 1000);
  CHECK((rall.labels - labels).cwiseAbs().minCoeff() == doctest::Approx(7.0));

  ContaminationSpec uni;
  uni.count = 100;
  uni.seed = 8;
  const auto r = inject_outliers(labels, uni);
  CHECK(r.outlier_idx.size() == 100);
  CHECK(std::is_sorted(r.outlier_idx.begin(), r.outlier_idx.end()));
  int changed = 0;
  for (int i = 0; i < 1000; ++i) {
    if (r.labels[i] != labels[i]) {
      ++changed;
      CHECK(std::binary_search(r.outlier_idx.begin(), r.outlier_idx.end(), i));
      CHECK(std::abs(r.labels[i]) <= 1e5);
    }
  }
  CHECK(changed == 100);

  ContaminationSpec flip;
  flip.count = 3;
  flip.generator = AdversarialFlip{};
  const auto rf = inject_outliers(labels, flip);
  for (int i : rf.outlier_idx) CHECK(rf.labels[i] == -10.0 * labels[i]);

  ContaminationSpec too_many;
  too_many.count = 1001;
  CHECK_THROWS_AS(inject_outliers(labels, too_many), std::invalid_argument);
}

TEST_CASE("make_regression_dataset partition and determinism") {
  const auto truth = random_sparse_truth(50, 50, 1);
  ContaminationSpec c;
  c.count = 100;
  c.seed = 2;
  const auto ds = make_regression_dataset(GaussianDesignSpec::identity(50), truth, NoiseModel::gaussian(1.0), c,
                                          1000, 3);
  CHECK(ds.informative_idx.size() == 900);
  CHECK(ds.outlier_idx.size() == 100);
  std::set<int> all(ds.informative_idx.begin(), ds.informative_idx.end());
  all.insert(ds.outlier_idx.begin(), ds.outlier_idx.end());
  CHECK(all.size() == 1000);

  // Informative labels are X t* + eps exactly.
  const VectorXd eps = sample_noise(NoiseModel::gaussian(1.0), 1000, derive_seed(3, 1));
  const VectorXd clean = ds.design * truth.coefficients() + eps;
  for (int i : ds.informative_idx) CHECK(ds.labels[i] == clean[i]);

  const auto again = make_regression_dataset(GaussianDesignSpec::identity(50), truth, NoiseModel::gaussian(1.0), c,
                                             1000, 3);
  CHECK(again.design == ds.design);
  CHECK(again.labels == ds.labels);

  ContaminationSpec zero;
  const auto quiet = make_regression_dataset(GaussianDesignSpec::identity(50), truth, NoiseModel::gaussian(1e-15),
                                             zero, 200, 4);
  CHECK((quiet.labels - quiet.design * truth.coefficients()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("sparse truth") {
  const auto t = random_sparse_truth(100, 7, 3);
  CHECK(t.sparsity() == 7);
  CHECK((t.coefficients().array() != 0.0).count() == 7);
  CHECK_THROWS(random_sparse_truth(5, 6, 1));
}

TEST_CASE("dataset csv round trip") {
  const auto truth = random_sparse_truth(4, 2, 1);
  ContaminationSpec c;
  c.count = 3;
  c.seed = 9;
  const auto ds = make_regression_dataset(GaussianDesignSpec::identity(4), truth, NoiseModel::cauchy(1.0), c, 20, 5);
  std::stringstream buf;
  write_dataset_csv(buf, ds);
  const auto back = load_dataset_csv(buf);
  CHECK(back.design == ds.design);
  CHECK(back.labels == ds.labels);
  CHECK(back.outlier_idx == ds.outlier_idx);
  CHECK(back.partition_known);

  std::stringstream no_flag("x_1,y\n1.5,2\n-1,0.25\n");
  const auto nf = load_dataset_csv(no_flag);
  CHECK(nf.n() == 2);
  CHECK_FALSE(nf.partition_known);
  CHECK(nf.informative_idx.size() == 2);

  std::stringstream header_only("x_1,x_2,y,is_outlier\n");
  const auto ho = load_dataset_csv(header_only);
  CHECK(ho.n() == 0);
  CHECK(ho.dim() == 2);

  std::stringstream empty("");
  CHECK_THROWS_WITH_AS(load_dataset_csv(empty), doctest::Contains("empty"), std::invalid_argument);

  std::stringstream bad("x_1,y\n1,2\n1,oops\n");
  CHECK_THROWS_WITH(load_dataset_csv(bad), doctest::Contains("line 3"));
}
