#include "turbocs/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace turbocs {

namespace {

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

// Next whitespace-delimited token, skipping '#' comments.
std::string next_token(std::istream& in) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  if (tok.empty()) throw std::runtime_error("pgm: truncated header");
  return tok;
}

}  // namespace

Eigen::MatrixXd load_pgm(const std::string& path, bool center_crop) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("pgm: cannot open " + path);

  if (next_token(in) != "P5") throw std::runtime_error("pgm: not a binary PGM (P5): " + path);
  const int width = std::stoi(next_token(in));
  const int height = std::stoi(next_token(in));
  const int maxval = std::stoi(next_token(in));
  if (width <= 0 || height <= 0) throw std::runtime_error("pgm: bad dimensions in " + path);
  if (maxval != 255) throw std::runtime_error("pgm: only 8-bit images supported: " + path);
  // The header ends with exactly one whitespace byte, already consumed by
  // next_token's terminating isspace read.

  std::vector<unsigned char> raw(static_cast<size_t>(width) * height);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
    throw std::runtime_error("pgm: truncated pixel data in " + path);
  }

  int row0 = 0, col0 = 0, side_r = height, side_c = width;
  if (width != height || !is_power_of_two(width)) {
    if (!center_crop) {
      throw std::runtime_error("pgm: " + path + " is " + std::to_string(width) + "x" +
                               std::to_string(height) +
                               ", need a power-of-two square (or enable cropping)");
    }
    int target = 1;
    while (target * 2 <= std::min(width, height)) target *= 2;
    row0 = (height - target) / 2;
    col0 = (width - target) / 2;
    side_r = side_c = target;
  }

  Eigen::MatrixXd image(side_r, side_c);
  for (int r = 0; r < side_r; ++r)
    for (int c = 0; c < side_c; ++c)
      image(r, c) = static_cast<double>(raw[static_cast<size_t>(row0 + r) * width + col0 + c]);
  return image;
}

void save_pgm(const Eigen::MatrixXd& image, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("pgm: cannot write " + path);
  out << "P5\n" << image.cols() << " " << image.rows() << "\n255\n";
  for (int r = 0; r < image.rows(); ++r) {
    for (int c = 0; c < image.cols(); ++c) {
      const double v = std::round(std::clamp(image(r, c), 0.0, 255.0));
      out.put(static_cast<char>(static_cast<unsigned char>(v)));
    }
  }
  if (!out) throw std::runtime_error("pgm: write failed for " + path);
}

}  // namespace turbocs
