#ifndef TURBOCS_WAVELET_HPP
#define TURBOCS_WAVELET_HPP

#include <Eigen/Dense>
#include <vector>

namespace turbocs {

/// Forest index over the wavelet coefficients of a square image.
///
/// Level -1 holds the approximation coefficients (no tree membership).
/// Level 0 holds the roots of the quad-trees; every node at level j < J-1
/// has exactly four children at level j+1 in the same subband.
struct QuadTreeIndex {
  int n_total = 0;
  int side = 0;      // image side d
  int n_levels = 0;  // J

  std::vector<int> level;                    // per coefficient, -1..J-1
  std::vector<int> parent;                   // -1 for levels -1 and 0
  std::vector<std::vector<int>> children;    // empty at level -1 and at leaves
  std::vector<std::vector<int>> level_sets;  // indexed by level+1

  int level_size(int j) const { return static_cast<int>(level_sets[j + 1].size()); }
};

/// Position of a coefficient in the serialized vector.
/// subband: -1 approximation, 0 horizontal detail, 1 vertical detail,
/// 2 diagonal detail. (row, col) index into the subband grid.
struct CoeffLocation {
  int level;
  int subband;
  int row;
  int col;
};

// Coefficient ordering: level-major (approximation block first, then levels
// 0..J-1 coarse to fine), subband-major within a level (horizontal,
// vertical, diagonal), row-major within a subband.
CoeffLocation locate_coeff(int side, int levels, int index);
int coeff_index(int side, int levels, const CoeffLocation& loc);

/// Orthonormal 2D Haar analysis. Requires a square power-of-two image with
/// 2^levels <= side. Energy preserving: ||theta||_2 == ||image||_F.
Eigen::VectorXd forward_dwt2(const Eigen::MatrixXd& image, int levels);

/// Orthonormal 2D Haar synthesis; exact inverse of forward_dwt2.
Eigen::MatrixXd inverse_dwt2(const Eigen::VectorXd& coeffs, int levels);

QuadTreeIndex build_tree_index(int side, int levels);

}  // namespace turbocs

#endif
