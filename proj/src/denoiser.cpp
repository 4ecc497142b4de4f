#include "turbocs/denoiser.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace turbocs {

namespace {

constexpr double kLambdaClamp = 1e-12;

double clamp_lambda(double lambda) {
  return std::clamp(lambda, kLambdaClamp, 1.0 - kLambdaClamp);
}

// (p, 1-p) for p = 1/(1 + exp(log_odds)), stable for any log_odds.
void split_by_log_odds(double log_odds, double& p_small_side, double& p_large_side) {
  if (log_odds >= 0.0) {
    const double e = std::exp(-log_odds);
    p_large_side = e / (1.0 + e);
    p_small_side = 1.0 / (1.0 + e);
  } else {
    const double e = std::exp(log_odds);
    p_large_side = 1.0 / (1.0 + e);
    p_small_side = e / (1.0 + e);
  }
}

}  // namespace

DenoiserOutput bg_denoise(double xi, double c, const BgPrior& prior) {
  if (!(c > 0.0)) throw std::invalid_argument("bg_denoise: c must be > 0");
  if (!std::isfinite(xi)) throw std::invalid_argument("bg_denoise: non-finite pseudo-data");
  const double sigma2 = prior.sigma2_on;
  if (!(sigma2 > 0.0)) throw std::invalid_argument("bg_denoise: sigma2_on must be > 0");
  const double lambda = clamp_lambda(prior.lambda);

  const double alpha = sigma2 / (sigma2 + c);   // slab Wiener gain
  const double zeta = alpha / (2.0 * c);        // = sigma2 / (2c(c + sigma2))
  const double half_log = 0.5 * std::log1p(sigma2 / c);
  const double llr = zeta * xi * xi - half_log;  // = ln((1-lambda)/(tau lambda))

  // tau = spike/slab posterior odds; work with the two posterior weights
  // instead of tau itself so nothing overflows.
  const double log_tau = std::log1p(-lambda) - std::log(lambda) + half_log - zeta * xi * xi;
  double p_spike, p_slab;
  split_by_log_odds(log_tau, p_spike, p_slab);

  DenoiserOutput out;
  out.mean = alpha * xi * p_slab;
  out.variance = c * alpha * p_slab + alpha * alpha * xi * xi * p_slab * p_spike;
  out.deriv = alpha * p_slab * (1.0 + 2.0 * zeta * xi * xi * p_spike);
  out.llr = llr;
  return out;
}

DenoiserOutput gm_denoise(double xi, double c, const GmPrior& prior) {
  if (!(c >= 0.0)) throw std::invalid_argument("gm_denoise: c must be >= 0");
  if (!std::isfinite(xi)) throw std::invalid_argument("gm_denoise: non-finite pseudo-data");
  const double s2l = prior.sigma2_large;
  const double s2s = prior.sigma2_small;
  if (!(s2l >= s2s) || s2s < 0.0) {
    throw std::invalid_argument("gm_denoise: need sigma2_large >= sigma2_small >= 0");
  }
  if (!(c + s2s > 0.0)) throw std::invalid_argument("gm_denoise: degenerate c + sigma2_small = 0");
  const double lambda = clamp_lambda(prior.lambda);

  const double gain_l = s2l / (c + s2l);
  const double gain_s = s2s / (c + s2s);
  const double zeta = (s2l - s2s) / (2.0 * (c + s2l) * (c + s2s));
  const double half_log = 0.5 * std::log((c + s2l) / (c + s2s));
  const double llr = zeta * xi * xi - half_log;

  const double log_tau = std::log1p(-lambda) - std::log(lambda) + half_log - zeta * xi * xi;
  double p_small, p_large;
  split_by_log_odds(log_tau, p_small, p_large);

  const double gain = gain_l * p_large + gain_s * p_small;
  DenoiserOutput out;
  out.mean = gain * xi;
  out.variance =
      c * gain + (gain_l - gain_s) * (gain_l - gain_s) * xi * xi * p_large * p_small;
  out.deriv = gain + 2.0 * zeta * xi * xi * (gain_l - gain_s) * p_large * p_small;
  out.llr = llr;
  return out;
}

double PriorState::max_signal_variance() const {
  if (model == Model::bg) return sigma2_on.maxCoeff();
  return sigma2_large.maxCoeff();
}

void denoise_batch(const Eigen::ArrayXd& xi, double c, const PriorState& priors,
                   Eigen::ArrayXd& mean, Eigen::ArrayXd& variance, Eigen::ArrayXd& deriv,
                   Eigen::ArrayXd& llr) {
  const int n = priors.size();
  if (static_cast<int>(xi.size()) != n) throw std::invalid_argument("denoise_batch: length mismatch");
  mean.resize(n);
  variance.resize(n);
  deriv.resize(n);
  llr.resize(n);
  if (priors.model == Model::bg) {
    for (int i = 0; i < n; ++i) {
      const DenoiserOutput o = bg_denoise(xi(i), c, {priors.lambda(i), priors.sigma2_on(i)});
      mean(i) = o.mean;
      variance(i) = o.variance;
      deriv(i) = o.deriv;
      llr(i) = o.llr;
    }
  } else {
    for (int i = 0; i < n; ++i) {
      const DenoiserOutput o =
          gm_denoise(xi(i), c, {priors.lambda(i), priors.sigma2_large(i), priors.sigma2_small(i)});
      mean(i) = o.mean;
      variance(i) = o.variance;
      deriv(i) = o.deriv;
      llr(i) = o.llr;
    }
  }
}

}  // namespace turbocs
