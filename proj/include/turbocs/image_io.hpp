#ifndef TURBOCS_IMAGE_IO_HPP
#define TURBOCS_IMAGE_IO_HPP

#include <Eigen/Dense>
#include <string>

namespace turbocs {

/// Loads an 8-bit binary PGM (P5) as reals in [0, 255]. The image must be a
/// power-of-two square unless center_crop is set, in which case the largest
/// centered power-of-two square is extracted.
Eigen::MatrixXd load_pgm(const std::string& path, bool center_crop = false);

/// Writes an 8-bit binary PGM; values are clamped to [0, 255] and rounded.
void save_pgm(const Eigen::MatrixXd& image, const std::string& path);

}  // namespace turbocs

#endif
