#ifndef TURBOCS_RNG_HPP
#define TURBOCS_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace turbocs {

/// Seeded standard-normal stream: mt19937_64 uniforms converted with the
/// Box-Muller transform. All randomness in the library flows through this
/// class from explicit seeds; there is no hidden global state.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : engine_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // uniforms in (0,1]; u1 > 0 keeps the log finite
    const double u1 = ((engine_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = (engine_() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = r * std::sin(angle);
    have_spare_ = true;
    return r * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace turbocs

#endif
