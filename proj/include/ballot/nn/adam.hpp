#pragma once

#include <cmath>
#include <cstdint>

#include "ballot/nn/tensor.hpp"

namespace ballot::nn {

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const {
    if (!(learning_rate >= 0.0)) throw Error(Errc::parameter, "adam: learning rate must be >= 0");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
      throw Error(Errc::parameter, "adam: betas must lie in [0,1)");
    if (!(epsilon > 0.0)) throw Error(Errc::parameter, "adam: epsilon must be > 0");
  }
};

template <typename Scalar>
struct AdamState {
  AdamState(const ParameterSet<Scalar>& params, AdamConfig cfg)
      : config(cfg), first_moment(params.zeros_like()), second_moment(params.zeros_like()) {
    config.validate();
  }

  AdamConfig config;
  std::int64_t step_count = 0;
  ParameterSet<Scalar> first_moment;
  ParameterSet<Scalar> second_moment;
};

// One bias-corrected Adam update.
template <typename Scalar>
void adam_step(ParameterSet<Scalar>& params, const GradientSet<Scalar>& grads,
               AdamState<Scalar>& state) {
  if (!params.same_shape(grads) || !params.same_shape(state.first_moment))
    throw Error(Errc::shape, "adam_step: parameter, gradient and moment shapes differ");
  const AdamConfig& c = state.config;
  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  const Scalar b1 = static_cast<Scalar>(c.beta1);
  const Scalar b2 = static_cast<Scalar>(c.beta2);
  const Scalar correction1 = static_cast<Scalar>(1.0 - std::pow(c.beta1, t));
  const Scalar correction2 = static_cast<Scalar>(1.0 - std::pow(c.beta2, t));
  const Scalar lr = static_cast<Scalar>(c.learning_rate);
  const Scalar eps = static_cast<Scalar>(c.epsilon);
  for (Index i = 0; i < params.size(); ++i) {
    auto m = state.first_moment[i].array();
    auto v = state.second_moment[i].array();
    const auto g = grads[i].array();
    m = b1 * m + (Scalar(1) - b1) * g;
    v = b2 * v + (Scalar(1) - b2) * g.square();
    params[i].array() -= lr * (m / correction1) / ((v / correction2).sqrt() + eps);
  }
}

}  // namespace ballot::nn
