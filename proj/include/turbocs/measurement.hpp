#ifndef TURBOCS_MEASUREMENT_HPP
#define TURBOCS_MEASUREMENT_HPP

#include <Eigen/Dense>
#include <cstdint>

#include "turbocs/wavelet.hpp"

namespace turbocs {

/// Compressive measurement operator A = Phi * Psi.
///
/// Phi is a dense M x N sensing matrix; Psi is the orthonormal Haar synthesis
/// when wavelet geometry (side, levels) is set, otherwise the identity.
/// Phi is regenerated from (m, n, seed) rather than persisted; entries are
/// i.i.d N(0, 1/M) drawn in column-major order from NormalSampler
/// (mt19937_64 + Box-Muller).
struct MeasurementOperator {
  enum class Kind { gaussian, identity, dense };

  Kind kind = Kind::gaussian;
  int m = 0;
  int n = 0;
  int side = 0;    // 0: coefficient domain equals measurement domain
  int levels = 0;  // wavelet levels when side > 0
  std::uint64_t seed = 0;
  Eigen::MatrixXd phi;  // empty for identity kind

  /// A theta: synthesize the image (if wavelet geometry set) and apply Phi.
  Eigen::VectorXd apply(const Eigen::VectorXd& coeffs) const;
  /// A^T residual.
  Eigen::VectorXd apply_adjoint(const Eigen::VectorXd& residual) const;

  /// Phi x on a flattened (row-major) image vector.
  Eigen::VectorXd apply_phi(const Eigen::VectorXd& image_vec) const;
};

struct Observation {
  Eigen::VectorXd y;
  double sigma2 = 0.0;
};

/// i.i.d Gaussian Phi acting directly on length-n vectors (no wavelet).
/// Oversampled m > n is rejected unless allow_oversampled is set.
MeasurementOperator gen_operator(int m, int n, std::uint64_t seed,
                                 bool allow_oversampled = false);

/// i.i.d Gaussian Phi composed with a J-level Haar synthesis on side x side
/// images (n = side^2).
MeasurementOperator gen_wavelet_operator(int m, int side, int levels, std::uint64_t seed);

/// Phi = I (test constructor). With wavelet geometry, A = Psi is orthonormal.
MeasurementOperator identity_operator(int n);
MeasurementOperator identity_wavelet_operator(int side, int levels);

/// Wraps an explicit dense matrix as the full operator A (test adapter).
MeasurementOperator dense_operator(const Eigen::MatrixXd& a);

/// y = Phi x + w, with w ~ N(0, sigma2 I) drawn from noise_seed.
Observation measure(const MeasurementOperator& op, const Eigen::MatrixXd& image, double sigma2,
                    std::uint64_t noise_seed);

/// Row-major image flattening used throughout the measurement path.
Eigen::VectorXd flatten(const Eigen::MatrixXd& image);
Eigen::MatrixXd unflatten(const Eigen::VectorXd& v, int side);

}  // namespace turbocs

#endif
