#ifndef TURBOCS_TURBO_HPP
#define TURBOCS_TURBO_HPP

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "turbocs/amp.hpp"
#include "turbocs/hmt.hpp"
#include "turbocs/learning.hpp"

namespace turbocs {

struct TurboConfig {
  Model model = Model::bg;
  bool use_tree = true;  // false: flat-prior AMP baseline (no HMT, pooled learning)
  int max_turbo = 10;
  double turbo_tol = 1e-5;
  int max_amp = 10;
  double amp_tol = 1e-5;
  double c_init_factor = 100.0;
  double llr_clamp = 30.0;
  std::uint64_t seed = 0;  // provenance only; the pipeline itself is deterministic
  HyperParams hyper;

  // flat-baseline hyperpriors (single precision and activity class)
  double flat_a = 1e-10;
  double flat_b = 1e-10;
  double flat_c = 0.0;  // 0 means 0.1 * N
  double flat_d = 0.0;  // 0 means 0.9 * N
};

/// Per-round learning snapshot.
struct TurboRound {
  int amp_iters = 0;
  double delta_mu = 0.0;
  double c = 0.0;
  double sigma2_noise = 0.0;
  std::vector<double> level_variances;        // BG, or GM large component
  std::vector<double> level_variances_small;  // GM only
  HmtParams hmt;
  std::vector<int> k_counts;
};

struct ReconstructionReport {
  Eigen::VectorXd theta_hat;
  Eigen::MatrixXd image_hat;
  std::optional<double> nmse_db;  // vs supplied ground truth
  int turbo_iters = 0;
  std::vector<int> amp_iters_per_turbo;
  std::vector<TurboRound> rounds;
  double wall_time_s = 0.0;
  bool diverged = false;
  std::string divergence_message;
};

/// Pluggable SSD stage (tests substitute an identity stub).
using SsdDecoder = std::function<StateMessages(const QuadTreeIndex&, const HmtParams&,
                                               const Eigen::ArrayX2d&)>;

/// Initial per-coefficient activity probabilities from the hyperprior means:
/// Beta means at levels -1 and 0, then the Markov-chain marginal recursion
/// lambda_{j+1} = lambda_j E{pi11_j} + (1 - lambda_j)(1 - E{pi00_j}).
Eigen::ArrayXd set_initial_priors(const HyperParams& hyper, const QuadTreeIndex& tree);

/// Hyperparameters per the standard defaults: noise Gamma(1, 1e-6), unit
/// level shapes with rates [10, 1, 1, 0.1, 0.1, ...], Beta strengths equal to
/// level populations with means (root 1/N, approx 1 - 1e-6, pi11 0.5,
/// pi00 1/N), and GM small-component rates 1e-6 times the large ones.
HyperParams default_hyperparams(const QuadTreeIndex& tree);

/// Full turbo reconstruction: alternate AMP (soft support recovery) and HMT
/// decoding (soft support decoding) with conjugate parameter learning in
/// between, warm-starting AMP across rounds.
ReconstructionReport reconstruct(const Observation& obs, const MeasurementOperator& op,
                                 const QuadTreeIndex& tree, const TurboConfig& cfg,
                                 const std::optional<Eigen::MatrixXd>& truth = std::nullopt,
                                 const SsdDecoder& decoder = nullptr);

/// ||x - x_hat||^2 / ||x||^2 in dB.
double nmse_db(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& estimate);
double nmse_db(const Eigen::VectorXd& truth, const Eigen::VectorXd& estimate);

}  // namespace turbocs

#endif
