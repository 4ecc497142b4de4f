#include "turbocs/amp.hpp"

#include <cmath>
#include <string>

namespace turbocs {

namespace {

DenoiserOutput denoise_one(const PriorState& priors, int n, double xi, double c) {
  if (priors.model == Model::bg) {
    return bg_denoise(xi, c, {priors.lambda(n), priors.sigma2_on(n)});
  }
  return gm_denoise(xi, c, {priors.lambda(n), priors.sigma2_large(n), priors.sigma2_small(n)});
}

double prior_marginal_variance(const PriorState& priors, int n) {
  if (priors.model == Model::bg) return priors.lambda(n) * priors.sigma2_on(n);
  return priors.lambda(n) * priors.sigma2_large(n) +
         (1.0 - priors.lambda(n)) * priors.sigma2_small(n);
}

}  // namespace

AmpState amp_step(const AmpState& state, const MeasurementOperator& op, const Observation& obs,
                  const PriorState& priors, const AmpOptions& opts) {
  const int m = op.m;

  AmpState next;
  next.iter = state.iter + 1;
  next.xi = (op.apply_adjoint(state.z) + state.mu).array();

  Eigen::ArrayXd mean, variance, deriv, llr;
  denoise_batch(next.xi, state.c, priors, mean, variance, deriv, llr);
  next.mu = mean.matrix();
  next.v = variance.matrix();
  next.llr = llr;

  next.z = obs.y - op.apply(next.mu);
  if (opts.onsager) {
    next.z += state.z * (deriv.sum() / m);
  }
  // The noise level entering c is the model's current belief, which the
  // learning stage may revise between turbo rounds.
  next.c = std::max(priors.sigma2_noise + next.v.sum() / m, opts.c_floor);

  if (!next.mu.allFinite() || !next.z.allFinite() || !std::isfinite(next.c)) {
    throw AmpFailure("amp_step: non-finite iterate at iteration " + std::to_string(next.iter),
                     state);
  }
  // Growth from a near-converged (tiny) residual is not divergence; require
  // the new residual to also dwarf the data scale.
  const double scale = std::max(state.z.norm(), obs.y.norm());
  if (next.z.norm() > opts.divergence_factor * scale && scale > 0.0) {
    throw AmpFailure("amp_step: residual grew more than " +
                         std::to_string(opts.divergence_factor) + "x at iteration " +
                         std::to_string(next.iter),
                     state);
  }
  next.last_delta = (next.mu - state.mu).norm();
  return next;
}

AmpState amp_run(const MeasurementOperator& op, const Observation& obs, const PriorState& priors,
                 const AmpOptions& opts, const std::optional<AmpState>& warm) {
  AmpState state;
  if (warm.has_value()) {
    state = *warm;
  } else {
    state.mu = Eigen::VectorXd::Zero(op.n);
    state.v = Eigen::VectorXd::Zero(op.n);
    state.z = obs.y;
    state.xi = Eigen::ArrayXd::Zero(op.n);
    state.llr = Eigen::ArrayXd::Zero(op.n);
    state.c = std::max(opts.c_init_factor * priors.max_signal_variance(), opts.c_floor);
    state.iter = 0;
  }

  for (int i = 0; i < opts.max_iter; ++i) {
    state = amp_step(state, op, obs, priors, opts);
    if (state.last_delta < opts.tol) break;
  }
  return state;
}

LbpResult lbp_oracle(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, double sigma2,
                     const PriorState& priors, int max_iters, double tol) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  if (static_cast<long>(m) * n > 10000) {
    throw std::invalid_argument("lbp_oracle: m*n exceeds the 10^4 test-scale guard");
  }
  if (priors.size() != n) throw std::invalid_argument("lbp_oracle: prior size mismatch");

  const Eigen::MatrixXd a2 = a.array().square();

  // Per-edge messages theta_n -> g_m, indexed (m, n).
  Eigen::MatrixXd mu_msg = Eigen::MatrixXd::Zero(m, n);
  Eigen::MatrixXd v_msg(m, n);
  for (int j = 0; j < n; ++j) v_msg.col(j).setConstant(prior_marginal_variance(priors, j));

  LbpResult res;
  res.mu = Eigen::VectorXd::Zero(n);
  res.v = Eigen::VectorXd::Zero(n);
  res.llr = Eigen::ArrayXd::Zero(n);

  Eigen::MatrixXd z_edge(m, n), c_edge(m, n);
  for (int it = 1; it <= max_iters; ++it) {
    // Factor-side leave-one-out residuals and noise estimates.
    for (int i = 0; i < m; ++i) {
      const double s1 = a.row(i).dot(mu_msg.row(i));
      const double s2 = a2.row(i).dot(v_msg.row(i));
      for (int j = 0; j < n; ++j) {
        z_edge(i, j) = y(i) - (s1 - a(i, j) * mu_msg(i, j));
        c_edge(i, j) = sigma2 + (s2 - a2(i, j) * v_msg(i, j));
      }
    }

    // Variable-side products of incoming Gaussians, then denoise.
    Eigen::VectorXd prev_mu = res.mu;
    for (int j = 0; j < n; ++j) {
      double prec_all = 0.0, num_all = 0.0;
      for (int i = 0; i < m; ++i) {
        prec_all += a2(i, j) / c_edge(i, j);
        num_all += a(i, j) * z_edge(i, j) / c_edge(i, j);
      }
      for (int i = 0; i < m; ++i) {
        const double prec = prec_all - a2(i, j) / c_edge(i, j);
        if (prec > 0.0) {
          const double num = num_all - a(i, j) * z_edge(i, j) / c_edge(i, j);
          const DenoiserOutput o = denoise_one(priors, j, num / prec, 1.0 / prec);
          mu_msg(i, j) = o.mean;
          v_msg(i, j) = o.variance;
        } else {  // no other factors: the message is the prior itself
          mu_msg(i, j) = 0.0;
          v_msg(i, j) = prior_marginal_variance(priors, j);
        }
      }
      const DenoiserOutput o = denoise_one(priors, j, num_all / prec_all, 1.0 / prec_all);
      res.mu(j) = o.mean;
      res.v(j) = o.variance;
      res.llr(j) = o.llr;
    }
    res.iters = it;
    if ((res.mu - prev_mu).norm() < tol && it > 1) break;
  }
  return res;
}

}  // namespace turbocs
