#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace mpg {

/// Deterministic random stream. All sampling in the toolkit goes through this
/// wrapper so that a seed pins the byte-exact output on every platform;
/// distribution helpers avoid std::uniform_real_distribution and friends,
/// whose draw counts are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform draw in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Index draw from an unnormalized weight vector (linear CDF scan).
  /// Returns the last positively weighted index if rounding pushes the draw
  /// past the accumulated total.
  int categorical(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform01() * total;
    double acc = 0.0;
    int last_positive = 0;
    for (int k = 0; k < static_cast<int>(weights.size()); ++k) {
      if (weights[k] <= 0.0) continue;
      acc += weights[k];
      last_positive = k;
      if (u < acc) return k;
    }
    return last_positive;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mpg
