#include "turbocs/measurement.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "turbocs/rng.hpp"

namespace turbocs {

namespace {

Eigen::MatrixXd sample_phi(int m, int n, std::uint64_t seed) {
  NormalSampler normal(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  Eigen::MatrixXd phi(m, n);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < m; ++r) phi(r, c) = scale * normal.next();
  return phi;
}

}  // namespace

Eigen::VectorXd flatten(const Eigen::MatrixXd& image) {
  const int side = static_cast<int>(image.rows());
  Eigen::VectorXd v(image.size());
  int k = 0;
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < static_cast<int>(image.cols()); ++c) v(k++) = image(r, c);
  return v;
}

Eigen::MatrixXd unflatten(const Eigen::VectorXd& v, int side) {
  if (static_cast<int>(v.size()) != side * side) {
    throw std::invalid_argument("unflatten: size mismatch");
  }
  Eigen::MatrixXd image(side, side);
  int k = 0;
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c) image(r, c) = v(k++);
  return image;
}

Eigen::VectorXd MeasurementOperator::apply_phi(const Eigen::VectorXd& image_vec) const {
  if (static_cast<int>(image_vec.size()) != n) {
    throw std::invalid_argument("apply_phi: expected length " + std::to_string(n));
  }
  if (kind == Kind::identity) return image_vec;
  return phi * image_vec;
}

Eigen::VectorXd MeasurementOperator::apply(const Eigen::VectorXd& coeffs) const {
  if (static_cast<int>(coeffs.size()) != n) {
    throw std::invalid_argument("apply: expected length " + std::to_string(n));
  }
  if (side > 0) {
    return apply_phi(flatten(inverse_dwt2(coeffs, levels)));
  }
  return apply_phi(coeffs);
}

Eigen::VectorXd MeasurementOperator::apply_adjoint(const Eigen::VectorXd& residual) const {
  if (static_cast<int>(residual.size()) != m) {
    throw std::invalid_argument("apply_adjoint: expected length " + std::to_string(m));
  }
  Eigen::VectorXd back;
  if (kind == Kind::identity) {
    back = residual;
  } else {
    back = phi.transpose() * residual;
  }
  if (side > 0) {
    return forward_dwt2(unflatten(back, side), levels);
  }
  return back;
}

MeasurementOperator gen_operator(int m, int n, std::uint64_t seed, bool allow_oversampled) {
  if (m < 1 || n < 1) throw std::invalid_argument("gen_operator: m, n must be positive");
  if (m > n && !allow_oversampled) {
    throw std::invalid_argument("gen_operator: m > n (pass allow_oversampled to permit)");
  }
  MeasurementOperator op;
  op.kind = MeasurementOperator::Kind::gaussian;
  op.m = m;
  op.n = n;
  op.seed = seed;
  op.phi = sample_phi(m, n, seed);
  return op;
}

MeasurementOperator gen_wavelet_operator(int m, int side, int levels, std::uint64_t seed) {
  MeasurementOperator op = gen_operator(m, side * side, seed);
  op.side = side;
  op.levels = levels;
  build_tree_index(side, levels);  // validates geometry
  return op;
}

MeasurementOperator identity_operator(int n) {
  MeasurementOperator op;
  op.kind = MeasurementOperator::Kind::identity;
  op.m = n;
  op.n = n;
  return op;
}

MeasurementOperator identity_wavelet_operator(int side, int levels) {
  MeasurementOperator op = identity_operator(side * side);
  op.side = side;
  op.levels = levels;
  build_tree_index(side, levels);
  return op;
}

MeasurementOperator dense_operator(const Eigen::MatrixXd& a) {
  MeasurementOperator op;
  op.kind = MeasurementOperator::Kind::dense;
  op.m = static_cast<int>(a.rows());
  op.n = static_cast<int>(a.cols());
  op.phi = a;
  return op;
}

Observation measure(const MeasurementOperator& op, const Eigen::MatrixXd& image, double sigma2,
                    std::uint64_t noise_seed) {
  if (sigma2 < 0.0) throw std::invalid_argument("measure: sigma2 must be >= 0");
  Observation obs;
  obs.sigma2 = sigma2;
  obs.y = op.apply_phi(flatten(image));
  if (sigma2 > 0.0) {
    NormalSampler normal(noise_seed);
    const double sd = std::sqrt(sigma2);
    for (int i = 0; i < op.m; ++i) obs.y(i) += sd * normal.next();
  }
  return obs;
}

}  // namespace turbocs
