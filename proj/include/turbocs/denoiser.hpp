#ifndef TURBOCS_DENOISER_HPP
#define TURBOCS_DENOISER_HPP

#include <Eigen/Dense>

namespace turbocs {

enum class Model { bg, gm };

/// Bernoulli-Gaussian (spike-slab) coefficient prior.
struct BgPrior {
  double lambda;     // activity probability, clamped to [1e-12, 1 - 1e-12]
  double sigma2_on;  // variance of the active component, > 0
};

/// Two-state zero-mean Gaussian-mixture prior.
struct GmPrior {
  double lambda;
  double sigma2_large;
  double sigma2_small;  // sigma2_large >= sigma2_small >= 0
};

/// Posterior moments of theta given pseudo-data xi = theta + N(0, c),
/// plus the extrinsic activity LLR (independent of lambda by construction).
struct DenoiserOutput {
  double mean;      // E[theta | xi]
  double variance;  // Var[theta | xi]
  double deriv;     // d mean / d xi
  double llr;       // ln p(xi | s=1) - ln p(xi | s=0)
};

DenoiserOutput bg_denoise(double xi, double c, const BgPrior& prior);
DenoiserOutput gm_denoise(double xi, double c, const GmPrior& prior);

/// Per-coefficient prior view used by the vectorized denoiser and the AMP
/// solver. Variance arrays are expanded per coefficient (values repeat within
/// a wavelet level); only the arrays matching `model` need to be populated.
struct PriorState {
  Model model = Model::bg;
  Eigen::ArrayXd lambda;
  Eigen::ArrayXd sigma2_on;     // bg
  Eigen::ArrayXd sigma2_large;  // gm
  Eigen::ArrayXd sigma2_small;  // gm
  double sigma2_noise = 0.0;

  int size() const { return static_cast<int>(lambda.size()); }
  double max_signal_variance() const;
};

/// Elementwise denoise; identical to the scalar calls.
void denoise_batch(const Eigen::ArrayXd& xi, double c, const PriorState& priors,
                   Eigen::ArrayXd& mean, Eigen::ArrayXd& variance, Eigen::ArrayXd& deriv,
                   Eigen::ArrayXd& llr);

}  // namespace turbocs

#endif
