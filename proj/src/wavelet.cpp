#include "turbocs/wavelet.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace turbocs {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

void check_geometry(int side, int levels) {
  if (!is_power_of_two(side)) {
    throw std::invalid_argument("image side must be a power of two, got " + std::to_string(side));
  }
  if (levels < 1) {
    throw std::invalid_argument("level count must be >= 1");
  }
  if ((1 << levels) > side) {
    throw std::invalid_argument("too many levels (" + std::to_string(levels) + ") for side " +
                                std::to_string(side));
  }
}

// One analysis butterfly over the leading `len` entries of a row.
void analyze_row(Eigen::MatrixXd& m, int r, int len, Eigen::VectorXd& tmp) {
  const int half = len / 2;
  for (int i = 0; i < half; ++i) {
    const double a = m(r, 2 * i);
    const double b = m(r, 2 * i + 1);
    tmp(i) = (a + b) * kInvSqrt2;
    tmp(half + i) = (a - b) * kInvSqrt2;
  }
  for (int i = 0; i < len; ++i) m(r, i) = tmp(i);
}

void analyze_col(Eigen::MatrixXd& m, int c, int len, Eigen::VectorXd& tmp) {
  const int half = len / 2;
  for (int i = 0; i < half; ++i) {
    const double a = m(2 * i, c);
    const double b = m(2 * i + 1, c);
    tmp(i) = (a + b) * kInvSqrt2;
    tmp(half + i) = (a - b) * kInvSqrt2;
  }
  for (int i = 0; i < len; ++i) m(i, c) = tmp(i);
}

void synthesize_row(Eigen::MatrixXd& m, int r, int len, Eigen::VectorXd& tmp) {
  const int half = len / 2;
  for (int i = 0; i < half; ++i) {
    const double s = m(r, i);
    const double w = m(r, half + i);
    tmp(2 * i) = (s + w) * kInvSqrt2;
    tmp(2 * i + 1) = (s - w) * kInvSqrt2;
  }
  for (int i = 0; i < len; ++i) m(r, i) = tmp(i);
}

void synthesize_col(Eigen::MatrixXd& m, int c, int len, Eigen::VectorXd& tmp) {
  const int half = len / 2;
  for (int i = 0; i < half; ++i) {
    const double s = m(i, c);
    const double w = m(half + i, c);
    tmp(2 * i) = (s + w) * kInvSqrt2;
    tmp(2 * i + 1) = (s - w) * kInvSqrt2;
  }
  for (int i = 0; i < len; ++i) m(i, c) = tmp(i);
}

int subband_side(int side, int levels, int level) { return side >> (levels - level); }

// Offset of the first coefficient of `level` in the serialized vector.
int level_offset(int side, int levels, int level) {
  const int approx = (side >> levels) * (side >> levels);
  if (level == -1) return 0;
  int off = approx;
  for (int j = 0; j < level; ++j) {
    const int s = subband_side(side, levels, j);
    off += 3 * s * s;
  }
  return off;
}

}  // namespace

CoeffLocation locate_coeff(int side, int levels, int index) {
  const int approx_side = side >> levels;
  const int approx_count = approx_side * approx_side;
  if (index < 0 || index >= side * side) {
    throw std::out_of_range("coefficient index out of range");
  }
  if (index < approx_count) {
    return {-1, -1, index / approx_side, index % approx_side};
  }
  int rem = index - approx_count;
  for (int j = 0; j < levels; ++j) {
    const int s = subband_side(side, levels, j);
    const int band_count = s * s;
    if (rem < 3 * band_count) {
      const int subband = rem / band_count;
      const int within = rem % band_count;
      return {j, subband, within / s, within % s};
    }
    rem -= 3 * band_count;
  }
  throw std::logic_error("locate_coeff: unreachable");
}

int coeff_index(int side, int levels, const CoeffLocation& loc) {
  if (loc.level == -1) {
    const int approx_side = side >> levels;
    return loc.row * approx_side + loc.col;
  }
  const int s = subband_side(side, levels, loc.level);
  return level_offset(side, levels, loc.level) + loc.subband * s * s + loc.row * s + loc.col;
}

Eigen::VectorXd forward_dwt2(const Eigen::MatrixXd& image, int levels) {
  const int side = static_cast<int>(image.rows());
  if (image.cols() != side) {
    throw std::invalid_argument("forward_dwt2 requires a square image");
  }
  check_geometry(side, levels);
  if (!image.allFinite()) {
    throw std::invalid_argument("forward_dwt2: non-finite pixel values");
  }

  Eigen::MatrixXd work = image;
  Eigen::VectorXd tmp(side);
  for (int len = side; len > (side >> levels); len /= 2) {
    for (int r = 0; r < len; ++r) analyze_row(work, r, len, tmp);
    for (int c = 0; c < len; ++c) analyze_col(work, c, len, tmp);
  }

  // Serialize: approximation block, then each level's three subbands.
  Eigen::VectorXd coeffs(side * side);
  const int approx_side = side >> levels;
  int out = 0;
  for (int r = 0; r < approx_side; ++r)
    for (int c = 0; c < approx_side; ++c) coeffs(out++) = work(r, c);
  for (int j = 0; j < levels; ++j) {
    const int s = subband_side(side, levels, j);
    for (int r = 0; r < s; ++r)
      for (int c = 0; c < s; ++c) coeffs(out++) = work(r, c + s);  // horizontal
    for (int r = 0; r < s; ++r)
      for (int c = 0; c < s; ++c) coeffs(out++) = work(r + s, c);  // vertical
    for (int r = 0; r < s; ++r)
      for (int c = 0; c < s; ++c) coeffs(out++) = work(r + s, c + s);  // diagonal
  }
  return coeffs;
}

Eigen::MatrixXd inverse_dwt2(const Eigen::VectorXd& coeffs, int levels) {
  const int n = static_cast<int>(coeffs.size());
  const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  if (side * side != n) {
    throw std::invalid_argument("inverse_dwt2: coefficient count is not a perfect square");
  }
  check_geometry(side, levels);

  Eigen::MatrixXd work(side, side);
  const int approx_side = side >> levels;
  int in = 0;
  for (int r = 0; r < approx_side; ++r)
    for (int c = 0; c < approx_side; ++c) work(r, c) = coeffs(in++);
  for (int j = 0; j < levels; ++j) {
    const int s = subband_side(side, levels, j);
    for (int r = 0; r < s; ++r)
      for (int c = 0; c < s; ++c) work(r, c + s) = coeffs(in++);
    for (int r = 0; r < s; ++r)
      for (int c = 0; c < s; ++c) work(r + s, c) = coeffs(in++);
    for (int r = 0; r < s; ++r)
      for (int c = 0; c < s; ++c) work(r + s, c + s) = coeffs(in++);
  }

  Eigen::VectorXd tmp(side);
  for (int len = (side >> levels) * 2; len <= side; len *= 2) {
    for (int c = 0; c < len; ++c) synthesize_col(work, c, len, tmp);
    for (int r = 0; r < len; ++r) synthesize_row(work, r, len, tmp);
  }
  return work;
}

QuadTreeIndex build_tree_index(int side, int levels) {
  check_geometry(side, levels);

  QuadTreeIndex tree;
  tree.side = side;
  tree.n_levels = levels;
  tree.n_total = side * side;
  tree.level.assign(tree.n_total, 0);
  tree.parent.assign(tree.n_total, -1);
  tree.children.assign(tree.n_total, {});
  tree.level_sets.assign(levels + 1, {});

  for (int n = 0; n < tree.n_total; ++n) {
    const CoeffLocation loc = locate_coeff(side, levels, n);
    tree.level[n] = loc.level;
    tree.level_sets[loc.level + 1].push_back(n);
    if (loc.level >= 0 && loc.level < levels - 1) {
      tree.children[n].reserve(4);
      for (int dr = 0; dr < 2; ++dr) {
        for (int dc = 0; dc < 2; ++dc) {
          const int child = coeff_index(
              side, levels, {loc.level + 1, loc.subband, 2 * loc.row + dr, 2 * loc.col + dc});
          tree.children[n].push_back(child);
          tree.parent[child] = n;
        }
      }
    }
  }
  return tree;
}

}  // namespace turbocs
