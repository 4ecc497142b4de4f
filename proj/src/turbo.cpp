#include "turbocs/turbo.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace turbocs {

namespace {

double beta_mean(double c, double d) { return c / (c + d); }

// Expand per-level values (indexed by level + 1) to per-coefficient arrays.
Eigen::ArrayXd expand_levels(const std::vector<double>& per_level, const QuadTreeIndex& tree) {
  Eigen::ArrayXd out(tree.n_total);
  for (int n = 0; n < tree.n_total; ++n) out(n) = per_level[tree.level[n] + 1];
  return out;
}

struct FlatHyper {
  double a, b, c, d;
};

FlatHyper flat_hyper(const TurboConfig& cfg, int n) {
  FlatHyper f;
  f.a = cfg.flat_a;
  f.b = cfg.flat_b;
  f.c = cfg.flat_c > 0.0 ? cfg.flat_c : 0.1 * n;
  f.d = cfg.flat_d > 0.0 ? cfg.flat_d : 0.9 * n;
  return f;
}

}  // namespace

HyperParams default_hyperparams(const QuadTreeIndex& tree) {
  const int levels = tree.n_levels;
  const double n = static_cast<double>(tree.n_total);
  HyperParams h;
  h.noise_a = 1.0;
  h.noise_b = 1e-6;

  h.level_a.assign(levels + 1, 1.0);
  h.level_b.resize(levels + 1);
  h.level_b[0] = 10.0;  // level -1
  for (int j = 0; j < levels; ++j) h.level_b[j + 1] = std::pow(10.0, -(j / 2));
  h.level_a_large = h.level_a;
  h.level_b_large = h.level_b;
  h.level_a_small.assign(levels + 1, 1.0);
  h.level_b_small.resize(levels + 1);
  for (int j = 0; j <= levels; ++j) h.level_b_small[j] = 1e-6 * h.level_b[j];

  const double n_root = tree.level_size(0);
  h.root_c = n_root / n;  // mean 1/N, strength N_0
  h.root_d = n_root - h.root_c;
  const double n_approx = tree.level_size(-1);
  h.approx_c = n_approx * (1.0 - 1e-6);  // mean 1 - 1e-6, strength N_{-1}
  h.approx_d = n_approx * 1e-6;

  h.trans11_c.resize(std::max(levels - 1, 0));
  h.trans11_d.resize(std::max(levels - 1, 0));
  h.trans00_c.resize(std::max(levels - 1, 0));
  h.trans00_d.resize(std::max(levels - 1, 0));
  for (int j = 0; j + 1 < levels; ++j) {
    const double nj = tree.level_size(j);
    h.trans11_c[j] = 0.5 * nj;  // mean 0.5, strength N_j
    h.trans11_d[j] = 0.5 * nj;
    h.trans00_c[j] = nj / n;  // mean 1/N, strength N_j
    h.trans00_d[j] = nj - nj / n;
  }
  return h;
}

Eigen::ArrayXd set_initial_priors(const HyperParams& hyper, const QuadTreeIndex& tree) {
  std::vector<double> lambda_level(tree.n_levels + 1);
  lambda_level[0] = beta_mean(hyper.approx_c, hyper.approx_d);
  lambda_level[1] = beta_mean(hyper.root_c, hyper.root_d);
  for (int j = 0; j + 1 < tree.n_levels; ++j) {
    const double m11 = beta_mean(hyper.trans11_c[j], hyper.trans11_d[j]);
    const double m00 = beta_mean(hyper.trans00_c[j], hyper.trans00_d[j]);
    lambda_level[j + 2] = lambda_level[j + 1] * m11 + (1.0 - lambda_level[j + 1]) * (1.0 - m00);
  }
  return expand_levels(lambda_level, tree);
}

double nmse_db(const Eigen::VectorXd& truth, const Eigen::VectorXd& estimate) {
  return 10.0 * std::log10((truth - estimate).squaredNorm() / truth.squaredNorm());
}

double nmse_db(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& estimate) {
  return 10.0 * std::log10((truth - estimate).squaredNorm() / truth.squaredNorm());
}

ReconstructionReport reconstruct(const Observation& obs, const MeasurementOperator& op,
                                 const QuadTreeIndex& tree, const TurboConfig& cfg,
                                 const std::optional<Eigen::MatrixXd>& truth,
                                 const SsdDecoder& decoder) {
  if (op.side == 0 || op.side != tree.side || op.levels != tree.n_levels) {
    throw std::invalid_argument("reconstruct: operator and tree geometry mismatch");
  }
  const auto t_start = std::chrono::steady_clock::now();
  const SsdDecoder ssd = decoder ? decoder : SsdDecoder(&hmt_decode);
  const FlatHyper flat = flat_hyper(cfg, op.n);

  // Round-1 priors from the hyperprior means.
  PriorState priors;
  priors.model = cfg.model;
  if (cfg.use_tree) {
    priors.lambda = set_initial_priors(cfg.hyper, tree);
  } else {
    priors.lambda = Eigen::ArrayXd::Constant(op.n, beta_mean(flat.c, flat.d));
  }
  if (cfg.model == Model::bg) {
    if (cfg.use_tree) {
      std::vector<double> v(tree.n_levels + 1);
      for (size_t i = 0; i < v.size(); ++i) v[i] = cfg.hyper.level_b[i] / cfg.hyper.level_a[i];
      priors.sigma2_on = expand_levels(v, tree);
      priors.sigma2_noise = cfg.hyper.noise_b / cfg.hyper.noise_a;
    } else {
      priors.sigma2_on = Eigen::ArrayXd::Constant(op.n, flat.b / flat.a);
      priors.sigma2_noise = 1e-6;
    }
  } else {
    if (cfg.use_tree) {
      std::vector<double> vl(tree.n_levels + 1), vs(tree.n_levels + 1);
      for (size_t i = 0; i < vl.size(); ++i) {
        vl[i] = cfg.hyper.level_b_large[i] / cfg.hyper.level_a_large[i];
        vs[i] = cfg.hyper.level_b_small[i] / cfg.hyper.level_a_small[i];
      }
      priors.sigma2_large = expand_levels(vl, tree);
      priors.sigma2_small = expand_levels(vs, tree);
    } else {
      priors.sigma2_large = Eigen::ArrayXd::Constant(op.n, flat.b / flat.a);
      priors.sigma2_small = Eigen::ArrayXd::Constant(op.n, 1e-6 * flat.b / flat.a);
    }
    priors.sigma2_noise = 0.0;  // GM assumes noiseless observations
  }

  AmpOptions amp_opts;
  amp_opts.max_iter = cfg.max_amp;
  amp_opts.tol = cfg.amp_tol;
  amp_opts.c_init_factor = cfg.c_init_factor;

  ReconstructionReport report;
  AmpState state;
  Eigen::VectorXd prev_mu = Eigen::VectorXd::Zero(op.n);
  std::optional<AmpState> warm;

  for (int t = 1; t <= cfg.max_turbo; ++t) {
    try {
      state = amp_run(op, obs, priors, amp_opts, warm);
    } catch (const AmpFailure& failure) {
      report.diverged = true;
      report.divergence_message = failure.what();
      if (t == 1) state = failure.last_state;  // keep the last stable iterate
      break;
    }
    const int iters_this_round = state.iter - (warm ? warm->iter : 0);
    warm = state;

    TurboRound round;
    round.amp_iters = iters_this_round;
    round.c = state.c;
    round.delta_mu = (state.mu - prev_mu).norm();

    // Learn statistical parameters from the round's support estimate.
    const SupportEstimate support = extract_support(state.llr, tree);
    for (int j = -1; j < tree.n_levels; ++j) round.k_counts.push_back(support.k_counts[j + 1]);

    if (cfg.use_tree) {
      if (cfg.model == Model::bg) {
        round.level_variances = update_precisions(cfg.hyper, support, state.mu);
        priors.sigma2_on = expand_levels(round.level_variances, tree);
        priors.sigma2_noise = update_noise(cfg.hyper, obs, op, state.mu);
      } else {
        const GmVariances gm = update_gm_variances(cfg.hyper, state.llr, state.mu, tree);
        round.level_variances = gm.large;
        round.level_variances_small = gm.small;
        priors.sigma2_large = expand_levels(gm.large, tree);
        priors.sigma2_small = expand_levels(gm.small, tree);
      }
      round.hmt = update_transitions(cfg.hyper, support, tree);

      // Soft support decoding: exchange extrinsic activity beliefs.
      const StateMessages msgs = ssd(tree, round.hmt, llr_to_pmf(state.llr, cfg.llr_clamp));
      priors.lambda = msgs.h_out.col(1);
    } else {
      // Flat baseline: one pooled activity rate and one pooled variance class.
      long k_active = 0;
      double sum_active = 0.0, sum_inactive = 0.0;
      for (int n = 0; n < op.n; ++n) {
        if (state.llr(n) > 0.0) {
          ++k_active;
          sum_active += state.mu(n) * state.mu(n);
        } else {
          sum_inactive += state.mu(n) * state.mu(n);
        }
      }
      const double var = (flat.b + 0.5 * sum_active) / (flat.a + 0.5 * k_active);
      const double act = (flat.c + k_active) / (flat.c + flat.d + op.n);
      if (cfg.model == Model::bg) {
        priors.sigma2_on.setConstant(var);
        HyperParams noise_only;
        priors.sigma2_noise = update_noise(noise_only, obs, op, state.mu);
      } else {
        const double var_small = (1e-6 * flat.b + 0.5 * sum_inactive) /
                                 (flat.a + 0.5 * (op.n - k_active));
        priors.sigma2_large.setConstant(var);
        priors.sigma2_small.setConstant(var_small);
      }
      priors.lambda.setConstant(act);
      round.level_variances.assign(1, var);
    }
    round.sigma2_noise = priors.sigma2_noise;
    report.rounds.push_back(round);
    report.amp_iters_per_turbo.push_back(iters_this_round);
    report.turbo_iters = t;

    if (round.delta_mu < cfg.turbo_tol) break;
    prev_mu = state.mu;
  }

  report.theta_hat = state.mu;
  report.image_hat = inverse_dwt2(state.mu, tree.n_levels);
  if (truth.has_value()) {
    report.nmse_db = nmse_db(*truth, report.image_hat);
  }
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return report;
}

}  // namespace turbocs
