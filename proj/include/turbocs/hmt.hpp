#ifndef TURBOCS_HMT_HPP
#define TURBOCS_HMT_HPP

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "turbocs/wavelet.hpp"

namespace turbocs {

/// Markov-tree activity parameters.
/// pi11[j] / pi00[j] govern transitions from a parent at level j to its
/// children at level j+1 (arrays sized n_levels - 1).
struct HmtParams {
  double pi_root = 0.5;    // Pr{s=1} at level 0
  double pi_approx = 0.5;  // Pr{s=1} at level -1 (tree-less)
  std::vector<double> pi11;
  std::vector<double> pi00;
};

/// Binary pmfs over the activity states, one per coefficient.
/// Column 0 is Pr{s=0}, column 1 is Pr{s=1}.
struct StateMessages {
  Eigen::ArrayX2d d_in;       // likelihoods entering the tree (from AMP)
  Eigen::ArrayX2d h_out;      // extrinsic messages leaving the tree
  Eigen::ArrayX2d posterior;  // h_out * d_in, normalized
};

/// One upward-downward sum-product pass per tree. h_out at node n is the
/// exact marginal of the tree prior combined with every d_in except node n's
/// own. Approximation coefficients (level -1) belong to no tree and receive
/// h_out = (1 - pi_approx, pi_approx).
StateMessages hmt_decode(const QuadTreeIndex& tree, const HmtParams& params,
                         const Eigen::ArrayX2d& d_in);

/// llr -> pmf conversion. Finite llrs are clamped to +/- llr_clamp before
/// exponentiation; +/- inf map to degenerate pmfs. NaN is rejected.
Eigen::ArrayX2d llr_to_pmf(const Eigen::ArrayXd& llr, double llr_clamp = 30.0);
Eigen::ArrayXd pmf_to_llr(const Eigen::ArrayX2d& pmf);

}  // namespace turbocs

#endif
