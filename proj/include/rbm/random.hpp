// Copyright the rbm authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef RBM_RANDOM_HPP
#define RBM_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace rbm
{

// mt19937_64 output is fixed by the standard; the conversions below avoid the
// implementation-defined distribution classes so streams match everywhere.
class Rng
{
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform in {0, ..., n - 1}; n > 0.
  std::uint64_t index(std::uint64_t n)
  {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = engine_();
    while (x >= limit)
      x = engine_();
    return x % n;
  }

  // Standard normal via Box-Muller.
  double normal()
  {
    double u1 = uniform();
    while (u1 <= 0.0)
      u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

private:
  std::mt19937_64 engine_;
};

}  // namespace rbm

#endif  // RBM_RANDOM_HPP
