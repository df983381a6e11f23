#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hsrec/coder.hpp"
#include "hsrec/priors.hpp"
#include "hsrec/rng.hpp"

using namespace hsrec;

namespace {

Eigen::MatrixXd random_nonneg(int rows, int cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform();
  return m;
}

}  // namespace

TEST_CASE("rank-1 data with a single atom") {
  Eigen::VectorXd y(4);
  y << 0.4, 0.8, 0.2, 0.1;
  Eigen::MatrixXd data = y.replicate(1, 12);

  // oracle: the best rank-1 non-negative fit is d = y/||y||, a_i = ||y||,
  // so any budget >= ||y|| leaves the constraint slack
  double need = y.norm();
  PriorFactorization f = factorize(data, 1, need * 2.0, 3, 10);
  CHECK(f.d.col(0).norm() == doctest::Approx(1.0).epsilon(1e-9));
  double cosangle = f.d.col(0).dot(y) / y.norm();
  CHECK(cosangle == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(f.objective_history.back() <= 1e-12 * data.squaredNorm() + 1e-18);
}

TEST_CASE("zero budget freezes codes at zero") {
  Rng rng(4);
  Eigen::MatrixXd data = random_nonneg(5, 9, rng);
  PriorFactorization f = factorize(data, 3, 0.0, 1, 5);
  CHECK(f.a.isZero(0.0));
  CHECK(f.objective_history.back() ==
        doctest::Approx(data.squaredNorm()).epsilon(1e-12));
}

TEST_CASE("training beats a fixed-dictionary coding-only baseline") {
  Rng rng(5);
  Eigen::MatrixXd data = random_nonneg(5, 20, rng);
  double delta = 2.0;
  PriorFactorization trained = factorize(data, 8, delta, 7, 10);

  // no-update baseline: a fixed dictionary of normalized data columns,
  // coding only
  Eigen::MatrixXd d0(5, 8);
  for (int k = 0; k < 8; ++k) d0.col(k) = data.col(k).normalized();
  double baseline = 0.0;
  for (int i = 0; i < data.cols(); ++i) {
    SparseCode code = code_l1_budget(data.col(i), d0, delta);
    baseline += (data.col(i) - d0 * code.dense(8)).squaredNorm();
  }
  CHECK(trained.objective_history.back() <= baseline + 1e-9);
}

TEST_CASE("objective non-increasing across alternations") {
  Rng rng(6);
  Eigen::MatrixXd data = random_nonneg(6, 25, rng);
  PriorFactorization f = factorize(data, 5, 1.5, 11, 10);
  for (std::size_t e = 1; e < f.objective_history.size(); ++e)
    CHECK(f.objective_history[e] <=
          f.objective_history[e - 1] + 1e-9 * (1 + f.objective_history[e - 1]));
}

TEST_CASE("non-negativity and norm constraints hold exactly") {
  Rng rng(7);
  Eigen::MatrixXd data = random_nonneg(4, 30, rng);
  PriorFactorization f = factorize(data, 6, 0.8, 13, 8);
  CHECK((f.d.array() >= 0.0).all());
  CHECK((f.a.array() >= 0.0).all());
  for (int k = 0; k < f.atoms(); ++k) CHECK(f.d.col(k).norm() <= 1.0 + 1e-12);
  for (int i = 0; i < f.a.cols(); ++i)
    CHECK(f.a.col(i).lpNorm<1>() <= f.delta + 1e-9);
}

TEST_CASE("over-complete dictionaries are allowed") {
  Rng rng(8);
  Eigen::MatrixXd data = random_nonneg(4, 5, rng);
  PriorFactorization f = factorize(data, 9, 1.0, 17, 4);
  CHECK(f.atoms() == 9);
  CHECK((f.d.array() >= 0.0).all());
}

TEST_CASE("deterministic given seed") {
  Rng rng(9);
  Eigen::MatrixXd data = random_nonneg(5, 12, rng);
  PriorFactorization a = factorize(data, 4, 1.0, 23, 6);
  PriorFactorization b = factorize(data, 4, 1.0, 23, 6);
  CHECK(a.d == b.d);
  CHECK(a.a == b.a);
}

TEST_CASE("negative data rejected") {
  Eigen::MatrixXd data = Eigen::MatrixXd::Constant(3, 3, -1.0);
  CHECK_THROWS_AS(factorize(data, 2, 1.0, 1, 2), std::invalid_argument);
}
