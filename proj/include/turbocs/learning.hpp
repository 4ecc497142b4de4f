#ifndef TURBOCS_LEARNING_HPP
#define TURBOCS_LEARNING_HPP

#include <Eigen/Dense>
#include <vector>

#include "turbocs/hmt.hpp"
#include "turbocs/measurement.hpp"
#include "turbocs/wavelet.hpp"

namespace turbocs {

/// Gamma shapes/rates and Beta counts for every learned parameter.
/// Per-level arrays are indexed by level + 1 (entry 0 is level -1);
/// transition arrays are indexed by parent level 0..J-2.
struct HyperParams {
  // noise precision rho = 1/sigma^2 ~ Gamma(a, b)
  double noise_a = 1.0;
  double noise_b = 1e-6;

  // per-level coefficient precisions (BG) / large and small components (GM)
  std::vector<double> level_a, level_b;
  std::vector<double> level_a_large, level_b_large;
  std::vector<double> level_a_small, level_b_small;

  // activity rates
  double root_c = 0.5, root_d = 0.5;      // pi_0^1 ~ Beta(c, d)
  double approx_c = 0.5, approx_d = 0.5;  // pi_{-1}^1 ~ Beta(c, d)

  // transition probabilities
  std::vector<double> trans11_c, trans11_d;
  std::vector<double> trans00_c, trans00_d;
};

/// Thresholded support surrogate built from AMP LLRs: active means LLR > 0.
struct SupportEstimate {
  std::vector<std::vector<int>> active_sets;  // per level (index = level + 1)
  std::vector<int> k_counts;                  // K_j = |active set|
  // per parent level j = 0..J-2, edge-based counts
  std::vector<long> trials11, successes11;  // edges with active parent / ... and active child
  std::vector<long> trials00, successes00;  // edges with inactive parent / ... and inactive child
};

SupportEstimate extract_support(const Eigen::ArrayXd& llr, const QuadTreeIndex& tree);

/// Posterior-mean precision update: sigma_j^2 = b_hat_j / a_hat_j with
/// a_hat = a + K/2, b_hat = b + (1/2) sum of mu^2 over the active set.
/// Returns per-level variances indexed by level + 1.
std::vector<double> update_precisions(const HyperParams& hyper, const SupportEstimate& support,
                                      const Eigen::VectorXd& mu);

/// Beta posterior means for all activity and transition parameters.
HmtParams update_transitions(const HyperParams& hyper, const SupportEstimate& support,
                             const QuadTreeIndex& tree);

/// sigma^2 = (b + ||y - A mu||^2 / 2) / (a + M/2). BG mode only.
double update_noise(const HyperParams& hyper, const Observation& obs,
                    const MeasurementOperator& op, const Eigen::VectorXd& mu);

struct GmVariances {
  std::vector<double> large;  // indexed by level + 1
  std::vector<double> small;
};

/// GM per-level variance learning: the large component learns from
/// coefficients with LLR > 0, the small component from the rest, each via
/// the Gamma rule with its own hyperparameters.
GmVariances update_gm_variances(const HyperParams& hyper, const Eigen::ArrayXd& llr,
                                const Eigen::VectorXd& mu, const QuadTreeIndex& tree);

}  // namespace turbocs

#endif
