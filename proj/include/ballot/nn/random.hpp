#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "ballot/nn/tensor.hpp"

namespace ballot::nn {

// All randomness flows through one engine type. The helpers below avoid the
// standard distributions so that a seed reproduces the same stream with any
// standard library.
using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  auto k = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
  return k < n ? k : n - 1;
}

template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[uniform_index(rng, i)]);
  }
}

template <typename Derived>
void fill_uniform(Eigen::DenseBase<Derived>& m, double lo, double hi, Rng& rng) {
  using Scalar = typename Derived::Scalar;
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = static_cast<Scalar>(uniform(rng, lo, hi));
}

// Uniform in [-sqrt(6/(fan_in+fan_out)), +sqrt(6/(fan_in+fan_out))].
template <typename Derived>
void glorot_uniform(Eigen::DenseBase<Derived>& m, Index fan_in, Index fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  fill_uniform(m, -limit, limit, rng);
}

}  // namespace ballot::nn
