#pragma once

#include <algorithm>
#include <cmath>

#include "ballot/nn/tensor.hpp"

namespace ballot::nn {

// Probabilities are clamped to [kProbEpsilon, 1 - kProbEpsilon] before logs.
inline constexpr double kProbEpsilon = 1e-7;

template <typename Scalar>
Scalar bce_loss(Scalar predicted, double target) {
  if (target != 0.0 && target != 1.0)
    throw Error(Errc::parameter, "bce_loss: target must be 0 or 1, got " + std::to_string(target));
  const Scalar eps(kProbEpsilon);
  const Scalar o = std::clamp(predicted, eps, Scalar(1) - eps);
  const Scalar t(target);
  return -t * std::log(o) - (Scalar(1) - t) * std::log(Scalar(1) - o);
}

// d bce / d logit for a sigmoid output. Uses the unclamped form so that a
// saturated wrong prediction still produces a gradient.
template <typename Scalar>
Scalar bce_logit_gradient(Scalar predicted, double target) {
  return predicted - Scalar(target);
}

template <typename DerivedP, typename DerivedQ>
typename DerivedQ::Scalar cross_entropy_loss(const Eigen::MatrixBase<DerivedP>& truth,
                                             const Eigen::MatrixBase<DerivedQ>& predicted) {
  using Scalar = typename DerivedQ::Scalar;
  if (truth.size() != predicted.size())
    throw Error(Errc::shape, "cross_entropy_loss: length " + std::to_string(truth.size()) + " vs " +
                                 std::to_string(predicted.size()));
  Scalar loss(0);
  for (Index i = 0; i < truth.size(); ++i) {
    const auto p = static_cast<Scalar>(truth.derived().reshaped()(i));
    if (p == Scalar(0)) continue;
    loss -= p * std::log(std::max(predicted.derived().reshaped()(i), Scalar(kProbEpsilon)));
  }
  return loss;
}

// Cross-entropy against a single true class.
template <typename Derived>
typename Derived::Scalar cross_entropy_loss(Index true_class,
                                            const Eigen::MatrixBase<Derived>& predicted) {
  using Scalar = typename Derived::Scalar;
  if (true_class < 0 || true_class >= predicted.size())
    throw Error(Errc::shape, "cross_entropy_loss: class " + std::to_string(true_class) +
                                 " outside " + std::to_string(predicted.size()) + " classes");
  return -std::log(std::max(predicted.derived().reshaped()(true_class), Scalar(kProbEpsilon)));
}

}  // namespace ballot::nn
