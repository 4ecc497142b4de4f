#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "support/oracles.hpp"
#include "turbocs/measurement.hpp"

using namespace turbocs;

TEST_CASE("same seed gives bitwise-identical operators") {
  const MeasurementOperator a = gen_operator(16, 64, 42);
  const MeasurementOperator b = gen_operator(16, 64, 42);
  CHECK((a.phi - b.phi).cwiseAbs().maxCoeff() == 0.0);
  const MeasurementOperator c = gen_operator(16, 64, 43);
  CHECK((a.phi - c.phi).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("column norms of A concentrate near one") {
  // Mean column squared norm of A equals ||Phi||_F^2 / N by orthonormality.
  const MeasurementOperator op = gen_wavelet_operator(600, 32, 3, 7);
  const double mean_sq = op.phi.squaredNorm() / op.n;
  CHECK(mean_sq > 0.95);
  CHECK(mean_sq < 1.05);

  // Individual columns stay within the concentration band for m >= 500.
  Eigen::VectorXd unit = Eigen::VectorXd::Zero(op.n);
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> pick(0, op.n - 1);
  for (int trial = 0; trial < 25; ++trial) {
    const int col = pick(rng);
    unit.setZero();
    unit(col) = 1.0;
    const double norm = op.apply(unit).norm();
    CHECK(norm > 0.8);
    CHECK(norm < 1.2);
  }
}

TEST_CASE("identity constructor applies as identity") {
  const MeasurementOperator op = identity_operator(9);
  Eigen::VectorXd v(9);
  v.setLinSpaced(9, -4.0, 4.0);
  CHECK((op.apply(v) - v).cwiseAbs().maxCoeff() == 0.0);
  CHECK((op.apply_adjoint(v) - v).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("oversampled m > n is rejected unless requested") {
  CHECK_THROWS_AS(gen_operator(10, 5, 1), std::invalid_argument);
  const MeasurementOperator op = gen_operator(10, 5, 1, true);
  CHECK(op.m == 10);
}

TEST_CASE("zero image measures to zero without noise") {
  const MeasurementOperator op = gen_operator(8, 16, 5);
  const Observation obs = measure(op, Eigen::MatrixXd::Zero(4, 4), 0.0, 9);
  CHECK(obs.y.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("noiseless measurement equals A theta") {
  const int side = 8, levels = 2;
  const MeasurementOperator op = gen_wavelet_operator(24, side, levels, 3);
  std::mt19937 rng(4);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd theta(op.n);
  for (int i = 0; i < op.n; ++i) theta(i) = gauss(rng);
  const Eigen::MatrixXd image = inverse_dwt2(theta, levels);
  const Observation obs = measure(op, image, 0.0, 1);
  CHECK((obs.y - op.apply(theta)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("noise variance matches the requested sigma2") {
  const int m = 10000;
  const MeasurementOperator op = gen_operator(m, m, 6, true);
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(100, 100);
  const Observation obs = measure(op, zero, 1.0, 77);
  const double sample_var = obs.y.squaredNorm() / m;
  CHECK(sample_var > 0.9);
  CHECK(sample_var < 1.1);
}

TEST_CASE("apply/apply_adjoint are exact adjoints") {
  const MeasurementOperator op = gen_wavelet_operator(20, 8, 3, 12);
  std::mt19937 rng(8);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd theta(op.n), r(op.m);
    for (int i = 0; i < op.n; ++i) theta(i) = gauss(rng);
    for (int i = 0; i < op.m; ++i) r(i) = gauss(rng);
    const double lhs = op.apply(theta).dot(r);
    const double rhs = theta.dot(op.apply_adjoint(r));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("operator composition matches an explicit dense matrix") {
  const MeasurementOperator op = gen_wavelet_operator(8, 4, 2, 19);
  // Materialize A column by column, then cross-check both directions.
  Eigen::MatrixXd a(op.m, op.n);
  Eigen::VectorXd unit = Eigen::VectorXd::Zero(op.n);
  for (int j = 0; j < op.n; ++j) {
    unit.setZero();
    unit(j) = 1.0;
    a.col(j) = op.apply(unit);
  }
  // Dense oracle: Phi times the dense synthesis matrix (analysis transpose).
  const Eigen::MatrixXd expected = op.phi * oracle::dense_haar_analysis(4, 2).transpose();
  CHECK((a - expected).cwiseAbs().maxCoeff() < 1e-12);

  std::mt19937 rng(2);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd theta(op.n), r(op.m);
  for (int i = 0; i < op.n; ++i) theta(i) = gauss(rng);
  for (int i = 0; i < op.m; ++i) r(i) = gauss(rng);
  CHECK((op.apply(theta) - expected * theta).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((op.apply_adjoint(r) - expected.transpose() * r).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("shape mismatches are rejected") {
  const MeasurementOperator op = gen_operator(8, 16, 5);
  CHECK_THROWS_AS(op.apply(Eigen::VectorXd::Zero(15)), std::invalid_argument);
  CHECK_THROWS_AS(op.apply_adjoint(Eigen::VectorXd::Zero(16)), std::invalid_argument);
  CHECK_THROWS_AS(measure(op, Eigen::MatrixXd::Zero(3, 3), 0.0, 1), std::invalid_argument);
}
