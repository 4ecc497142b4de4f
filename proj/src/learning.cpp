#include "turbocs/learning.hpp"

#include <stdexcept>

namespace turbocs {

SupportEstimate extract_support(const Eigen::ArrayXd& llr, const QuadTreeIndex& tree) {
  if (static_cast<int>(llr.size()) != tree.n_total) {
    throw std::invalid_argument("extract_support: llr size mismatch");
  }
  const int levels = tree.n_levels;
  SupportEstimate s;
  s.active_sets.assign(levels + 1, {});
  s.k_counts.assign(levels + 1, 0);
  s.trials11.assign(std::max(levels - 1, 0), 0);
  s.successes11.assign(std::max(levels - 1, 0), 0);
  s.trials00.assign(std::max(levels - 1, 0), 0);
  s.successes00.assign(std::max(levels - 1, 0), 0);

  for (int n = 0; n < tree.n_total; ++n) {
    if (llr(n) > 0.0) {  // strict: L == 0 counts as inactive
      s.active_sets[tree.level[n] + 1].push_back(n);
    }
  }
  for (int j = -1; j < levels; ++j) {
    s.k_counts[j + 1] = static_cast<int>(s.active_sets[j + 1].size());
  }

  // One Bernoulli trial per parent->child edge.
  for (int j = 0; j + 1 < levels; ++j) {
    for (int parent : tree.level_sets[j + 1]) {
      const bool parent_active = llr(parent) > 0.0;
      for (int child : tree.children[parent]) {
        const bool child_active = llr(child) > 0.0;
        if (parent_active) {
          ++s.trials11[j];
          if (child_active) ++s.successes11[j];
        } else {
          ++s.trials00[j];
          if (!child_active) ++s.successes00[j];
        }
      }
    }
  }
  return s;
}

std::vector<double> update_precisions(const HyperParams& hyper, const SupportEstimate& support,
                                      const Eigen::VectorXd& mu) {
  const int n_levels = static_cast<int>(support.k_counts.size());
  if (static_cast<int>(hyper.level_a.size()) < n_levels ||
      static_cast<int>(hyper.level_b.size()) < n_levels) {
    throw std::invalid_argument("update_precisions: hyperparameter arrays too short");
  }
  std::vector<double> variances(n_levels);
  for (int idx = 0; idx < n_levels; ++idx) {
    double sum_sq = 0.0;
    for (int n : support.active_sets[idx]) sum_sq += mu(n) * mu(n);
    const double a_hat = hyper.level_a[idx] + 0.5 * support.k_counts[idx];
    const double b_hat = hyper.level_b[idx] + 0.5 * sum_sq;
    variances[idx] = b_hat / a_hat;
  }
  return variances;
}

HmtParams update_transitions(const HyperParams& hyper, const SupportEstimate& support,
                             const QuadTreeIndex& tree) {
  HmtParams params;
  params.pi_root = (hyper.root_c + support.k_counts[0 + 1]) /
                   (hyper.root_c + hyper.root_d + tree.level_size(0));
  params.pi_approx = (hyper.approx_c + support.k_counts[-1 + 1]) /
                     (hyper.approx_c + hyper.approx_d + tree.level_size(-1));

  const int n_trans = tree.n_levels - 1;
  if (static_cast<int>(hyper.trans11_c.size()) < n_trans ||
      static_cast<int>(hyper.trans00_c.size()) < n_trans) {
    throw std::invalid_argument("update_transitions: hyperparameter arrays too short");
  }
  params.pi11.resize(n_trans);
  params.pi00.resize(n_trans);
  for (int j = 0; j < n_trans; ++j) {
    const double c11 = hyper.trans11_c[j] + support.successes11[j];
    const double d11 = hyper.trans11_d[j] + support.trials11[j] - support.successes11[j];
    params.pi11[j] = c11 / (c11 + d11);
    const double c00 = hyper.trans00_c[j] + support.successes00[j];
    const double d00 = hyper.trans00_d[j] + support.trials00[j] - support.successes00[j];
    params.pi00[j] = c00 / (c00 + d00);
  }
  return params;
}

double update_noise(const HyperParams& hyper, const Observation& obs,
                    const MeasurementOperator& op, const Eigen::VectorXd& mu) {
  const double residual_sq = (obs.y - op.apply(mu)).squaredNorm();
  const double a_hat = hyper.noise_a + 0.5 * op.m;
  const double b_hat = hyper.noise_b + 0.5 * residual_sq;
  return b_hat / a_hat;
}

GmVariances update_gm_variances(const HyperParams& hyper, const Eigen::ArrayXd& llr,
                                const Eigen::VectorXd& mu, const QuadTreeIndex& tree) {
  const int n_levels = tree.n_levels + 1;
  if (static_cast<int>(hyper.level_a_large.size()) < n_levels ||
      static_cast<int>(hyper.level_a_small.size()) < n_levels) {
    throw std::invalid_argument("update_gm_variances: hyperparameter arrays too short");
  }
  GmVariances out;
  out.large.resize(n_levels);
  out.small.resize(n_levels);
  for (int j = -1; j < tree.n_levels; ++j) {
    double sum_large = 0.0, sum_small = 0.0;
    long k_large = 0, k_small = 0;
    for (int n : tree.level_sets[j + 1]) {
      if (llr(n) > 0.0) {
        sum_large += mu(n) * mu(n);
        ++k_large;
      } else {
        sum_small += mu(n) * mu(n);
        ++k_small;
      }
    }
    out.large[j + 1] = (hyper.level_b_large[j + 1] + 0.5 * sum_large) /
                       (hyper.level_a_large[j + 1] + 0.5 * k_large);
    out.small[j + 1] = (hyper.level_b_small[j + 1] + 0.5 * sum_small) /
                       (hyper.level_a_small[j + 1] + 0.5 * k_small);
  }
  return out;
}

}  // namespace turbocs
