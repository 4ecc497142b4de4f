#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "support/oracles.hpp"
#include "turbocs/denoiser.hpp"

using namespace turbocs;

TEST_CASE("bg: odd symmetry at xi = 0") {
  const BgPrior prior{0.3, 2.0};
  const DenoiserOutput out = bg_denoise(0.0, 0.5, prior);
  CHECK(out.mean == 0.0);
  // llr(0) = ln((1-lambda)/(lambda beta(c))) = -0.5 ln(1 + sigma2/c)
  const double expected_llr = -0.5 * std::log1p(2.0 / 0.5);
  CHECK(out.llr == doctest::Approx(expected_llr).epsilon(1e-12));
  CHECK(out.variance > 0.0);
}

TEST_CASE("bg: lambda -> 1 recovers the Wiener filter") {
  const double sigma2 = 3.0, c = 0.7, xi = 1.3;
  const DenoiserOutput out = bg_denoise(xi, c, {1.0, sigma2});  // clamped internally
  CHECK(out.mean == doctest::Approx(xi * sigma2 / (sigma2 + c)).epsilon(1e-9));
  CHECK(out.variance == doctest::Approx(sigma2 * c / (sigma2 + c)).epsilon(1e-9));
  CHECK(out.deriv == doctest::Approx(sigma2 / (sigma2 + c)).epsilon(1e-9));
}

TEST_CASE("bg: spec point against the quadrature oracle") {
  const DenoiserOutput out = bg_denoise(1.5, 0.25, {0.1, 1.0});
  const oracle::Moments mom = oracle::bg_moments(1.5, 0.25, 0.1, 1.0);
  CHECK(oracle::close_rel(out.mean, mom.mean, 1e-8));
  CHECK(oracle::close_rel(out.variance, mom.variance, 1e-8));
  CHECK(oracle::close_rel(out.llr, mom.llr, 1e-8));
}

TEST_CASE("gm: spec point against the quadrature oracle") {
  const DenoiserOutput out = gm_denoise(2.0, 0.5, {0.2, 4.0, 0.01});
  const oracle::Moments mom = oracle::gm_moments(2.0, 0.5, 0.2, 4.0, 0.01);
  CHECK(oracle::close_rel(out.mean, mom.mean, 1e-8));
  CHECK(oracle::close_rel(out.variance, mom.variance, 1e-8));
  CHECK(oracle::close_rel(out.llr, mom.llr, 1e-8));
}

TEST_CASE("gm: equal variances make the components indistinguishable") {
  const double s2 = 1.7, c = 0.4, xi = 0.9;
  for (double lambda : {0.05, 0.5, 0.95}) {
    const DenoiserOutput out = gm_denoise(xi, c, {lambda, s2, s2});
    CHECK(out.mean == doctest::Approx(xi * s2 / (s2 + c)).epsilon(1e-12));
    CHECK(out.llr == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("gm: xi = 0 symmetry") {
  const DenoiserOutput out = gm_denoise(0.0, 0.3, {0.25, 2.0, 0.05});
  CHECK(out.mean == 0.0);
  CHECK(out.variance > 0.0);
}

TEST_CASE("gm with zero small variance reduces to bg") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double xi = 8.0 * (u(rng) - 0.5);
    const double c = 0.01 + 2.0 * u(rng);
    const double lambda = 0.02 + 0.9 * u(rng);
    const double s2 = 0.1 + 3.0 * u(rng);
    const DenoiserOutput bg = bg_denoise(xi, c, {lambda, s2});
    const DenoiserOutput gm = gm_denoise(xi, c, {lambda, s2, 0.0});
    CHECK(oracle::close_rel(gm.mean, bg.mean, 1e-12));
    CHECK(oracle::close_rel(gm.variance, bg.variance, 1e-12));
    CHECK(oracle::close_rel(gm.deriv, bg.deriv, 1e-12));
    CHECK(oracle::close_rel(gm.llr, bg.llr, 1e-12));
  }
}

TEST_CASE("mmse property over a random grid (bg and gm)") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 120; ++trial) {
    const double sigma2 = 0.1 + 5.0 * u(rng);
    const double c = 0.005 + 2.0 * u(rng);
    const double lambda = 0.01 + 0.95 * u(rng);
    const double xi = 10.0 * (u(rng) - 0.5) * std::sqrt(sigma2 + c);

    const DenoiserOutput bg = bg_denoise(xi, c, {lambda, sigma2});
    const oracle::Moments bgm = oracle::bg_moments(xi, c, lambda, sigma2);
    CHECK(oracle::close_rel(bg.mean, bgm.mean, 1e-7, 1e-11));
    CHECK(oracle::close_rel(bg.variance, bgm.variance, 1e-7, 1e-11));
    CHECK(oracle::close_rel(bg.llr, bgm.llr, 1e-7, 1e-11));

    const double s2s = sigma2 * (0.001 + 0.2 * u(rng));
    const DenoiserOutput gm = gm_denoise(xi, c, {lambda, sigma2, s2s});
    const oracle::Moments gmm = oracle::gm_moments(xi, c, lambda, sigma2, s2s);
    CHECK(oracle::close_rel(gm.mean, gmm.mean, 1e-7, 1e-11));
    CHECK(oracle::close_rel(gm.variance, gmm.variance, 1e-7, 1e-11));
    CHECK(oracle::close_rel(gm.llr, gmm.llr, 1e-7, 1e-11));
  }
}

TEST_CASE("derivative matches central finite differences, including large xi") {
  std::mt19937 rng(123);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 150; ++trial) {
    const double sigma2 = 0.2 + 4.0 * u(rng);
    const double c = 0.01 + 1.5 * u(rng);
    const double lambda = 0.02 + 0.9 * u(rng);
    // cover the transition region and far tails
    const double scale = std::sqrt(sigma2 + c);
    const double xi = (trial % 3 == 0 ? 25.0 : 6.0) * (u(rng) - 0.5) * scale;
    const double h = 1e-5 * std::max(1.0, std::abs(xi));

    const DenoiserOutput bg = bg_denoise(xi, c, {lambda, sigma2});
    const double bg_fd =
        (bg_denoise(xi + h, c, {lambda, sigma2}).mean - bg_denoise(xi - h, c, {lambda, sigma2}).mean) /
        (2.0 * h);
    CHECK(oracle::close_rel(bg.deriv, bg_fd, 1e-4, 1e-8));

    const double s2s = 0.01 * sigma2;
    const DenoiserOutput gm = gm_denoise(xi, c, {lambda, sigma2, s2s});
    const double gm_fd = (gm_denoise(xi + h, c, {lambda, sigma2, s2s}).mean -
                          gm_denoise(xi - h, c, {lambda, sigma2, s2s}).mean) /
                         (2.0 * h);
    CHECK(oracle::close_rel(gm.deriv, gm_fd, 1e-4, 1e-8));
  }
}

TEST_CASE("tweedie identity: variance equals c times the derivative") {
  std::mt19937 rng(321);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const double sigma2 = 0.1 + 6.0 * u(rng);
    const double c = 0.01 + 3.0 * u(rng);
    const double lambda = 0.01 + 0.97 * u(rng);
    const double xi = 16.0 * (u(rng) - 0.5) * std::sqrt(sigma2 + c);
    const DenoiserOutput bg = bg_denoise(xi, c, {lambda, sigma2});
    CHECK(oracle::close_rel(bg.variance, c * bg.deriv, 1e-6, 1e-12));
    const double s2s = sigma2 * 0.05 * u(rng);
    const DenoiserOutput gm = gm_denoise(xi, c, {lambda, sigma2, std::max(s2s, 1e-6)});
    CHECK(oracle::close_rel(gm.variance, c * gm.deriv, 1e-6, 1e-12));
  }
}

TEST_CASE("bg shrinkage: 0 <= F(xi)/xi <= 1") {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double xi = 20.0 * (u(rng) - 0.5);
    if (xi == 0.0) continue;
    const DenoiserOutput out =
        bg_denoise(xi, 0.01 + 3.0 * u(rng), {0.01 + 0.98 * u(rng), 0.1 + 5.0 * u(rng)});
    const double ratio = out.mean / xi;
    CHECK(ratio >= 0.0);
    CHECK(ratio <= 1.0);
  }
}

TEST_CASE("bg llr increases with |xi|") {
  const BgPrior prior{0.2, 2.0};
  double prev = bg_denoise(0.0, 0.5, prior).llr;
  for (double xi = 0.25; xi < 12.0; xi += 0.25) {
    const double cur = bg_denoise(xi, 0.5, prior).llr;
    CHECK(cur > prev);
    CHECK(bg_denoise(-xi, 0.5, prior).llr == doctest::Approx(cur).epsilon(1e-12));
    prev = cur;
  }
}

TEST_CASE("extreme pseudo-data saturates without overflow") {
  const DenoiserOutput far = bg_denoise(1e8, 1e-6, {0.5, 1.0});
  CHECK(std::isfinite(far.mean));
  CHECK(std::isfinite(far.variance));
  CHECK(far.mean == doctest::Approx(1e8).epsilon(1e-5));  // fully active
  const DenoiserOutput tiny = bg_denoise(1e-12, 1e-6, {1e-9, 1.0});
  CHECK(std::isfinite(tiny.mean));
  CHECK(std::abs(tiny.mean) <= 1e-12);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(bg_denoise(1.0, 0.0, {0.5, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(bg_denoise(1.0, -1.0, {0.5, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(bg_denoise(std::nan(""), 1.0, {0.5, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(gm_denoise(1.0, 0.0, {0.5, 1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(gm_denoise(1.0, 1.0, {0.5, 0.1, 0.5}), std::invalid_argument);
}

TEST_CASE("batch denoise equals scalar calls") {
  const int n = 64;
  PriorState priors;
  priors.model = Model::bg;
  priors.lambda.resize(n);
  priors.sigma2_on.resize(n);
  Eigen::ArrayXd xi(n);
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    priors.lambda(i) = 0.05 + 0.9 * u(rng);
    priors.sigma2_on(i) = 0.1 + 4.0 * u(rng);  // mixed per-level variances
    xi(i) = 8.0 * (u(rng) - 0.5);
  }
  const double c = 0.37;
  Eigen::ArrayXd mean, variance, deriv, llr;
  denoise_batch(xi, c, priors, mean, variance, deriv, llr);
  for (int i = 0; i < n; ++i) {
    const DenoiserOutput o = bg_denoise(xi(i), c, {priors.lambda(i), priors.sigma2_on(i)});
    CHECK(mean(i) == o.mean);
    CHECK(variance(i) == o.variance);
    CHECK(deriv(i) == o.deriv);
    CHECK(llr(i) == o.llr);
  }

  // length-1 batch is the scalar call
  PriorState one;
  one.model = Model::bg;
  one.lambda = Eigen::ArrayXd::Constant(1, 0.3);
  one.sigma2_on = Eigen::ArrayXd::Constant(1, 1.5);
  Eigen::ArrayXd m1, v1, d1, l1;
  denoise_batch(Eigen::ArrayXd::Constant(1, 0.8), c, one, m1, v1, d1, l1);
  const DenoiserOutput o = bg_denoise(0.8, c, {0.3, 1.5});
  CHECK(m1(0) == o.mean);
  CHECK(l1(0) == o.llr);
}

TEST_CASE("large random batch keeps variances finite and nonnegative") {
  const int n = 10000;
  PriorState priors;
  priors.model = Model::gm;
  priors.lambda.resize(n);
  priors.sigma2_large.resize(n);
  priors.sigma2_small.resize(n);
  Eigen::ArrayXd xi(n);
  std::mt19937 rng(44);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    priors.lambda(i) = 0.01 + 0.98 * u(rng);
    priors.sigma2_large(i) = 0.5 + 4.0 * u(rng);
    priors.sigma2_small(i) = 0.001 * priors.sigma2_large(i);
    xi(i) = 30.0 * (u(rng) - 0.5);
  }
  Eigen::ArrayXd mean, variance, deriv, llr;
  denoise_batch(xi, 0.2, priors, mean, variance, deriv, llr);
  CHECK(variance.minCoeff() >= 0.0);
  CHECK(std::isfinite(variance.sum()));
  CHECK(variance.sum() > 0.0);
}
