#pragma once

#include <random>
#include <vector>

#include "tristat/colorspace.hpp"

namespace tristat::testing {

/// Seeded generator for hand-rolled property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double Uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double LogUniform(double lo, double hi) { return std::exp(Uniform(std::log(lo), std::log(hi))); }
  int Int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  /// Strictly positive color with components spanning a few decades.
  Tristimulus Color() {
    const double scale = LogUniform(1e-2, 1e3);
    return {scale * Uniform(0.01, 1.0), scale * Uniform(0.01, 1.0), scale * Uniform(0.01, 1.0)};
  }

  Mat3 Matrix(double spread = 0.3) {
    Mat3 m = Mat3::Identity();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) += Uniform(-spread, spread);
    return m;
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace tristat::testing
