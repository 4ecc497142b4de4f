#ifndef TURBOCS_AMP_HPP
#define TURBOCS_AMP_HPP

#include <Eigen/Dense>
#include <limits>
#include <optional>
#include <stdexcept>

#include "turbocs/denoiser.hpp"
#include "turbocs/measurement.hpp"

namespace turbocs {

/// AMP iterate. c is the scalar effective noise variance (sigma^2 plus the
/// average posterior variance), floored at c_floor to survive sigma^2 = 0.
struct AmpState {
  Eigen::VectorXd mu;   // posterior means
  Eigen::VectorXd v;    // posterior variances
  Eigen::VectorXd z;    // Onsager-corrected residual
  Eigen::ArrayXd xi;    // pseudo-data from the last sweep
  Eigen::ArrayXd llr;   // extrinsic activity LLRs from the last denoise
  double c = 0.0;
  int iter = 0;
  double last_delta = std::numeric_limits<double>::infinity();  // ||mu - mu_prev||_2
};

struct AmpOptions {
  int max_iter = 10;
  double tol = 1e-5;
  double c_init_factor = 100.0;  // cold-start c = factor * max prior variance
  double c_floor = 1e-12;
  double divergence_factor = 10.0;  // abort when ||z|| grows this much in one step
  bool onsager = true;              // test hook; disabling yields plain thresholding
};

/// Thrown when an iterate goes non-finite or the residual blows up; carries
/// the last stable state for post-mortem reporting.
class AmpFailure : public std::runtime_error {
 public:
  AmpFailure(const std::string& what, AmpState last)
      : std::runtime_error(what), last_state(std::move(last)) {}
  AmpState last_state;
};

/// One AMP sweep:
///   xi  = A^T z + mu
///   mu+ = F(xi; c), v+ = G(xi; c)
///   z+  = y - A mu+ + (z/M) sum_n F'(xi_n; c)
///   c+  = sigma^2 + (1/M) sum_n v+_n   (floored)
AmpState amp_step(const AmpState& state, const MeasurementOperator& op, const Observation& obs,
                  const PriorState& priors, const AmpOptions& opts = {});

/// Runs AMP to tolerance or max_iter. Cold start: z = y, mu = 0,
/// c = c_init_factor * max prior variance. A warm state resumes exactly.
AmpState amp_run(const MeasurementOperator& op, const Observation& obs, const PriorState& priors,
                 const AmpOptions& opts = {}, const std::optional<AmpState>& warm = std::nullopt);

/// Full O(MN) per-edge loopy-BP reference on a small dense system.
/// Test oracle only; guarded to m * n <= 10^4.
struct LbpResult {
  Eigen::VectorXd mu;
  Eigen::VectorXd v;
  Eigen::ArrayXd llr;
  int iters = 0;
};

LbpResult lbp_oracle(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, double sigma2,
                     const PriorState& priors, int max_iters = 100, double tol = 1e-10);

}  // namespace turbocs

#endif
