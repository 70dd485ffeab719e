#pragma once

#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

#include "ballot/nn/adam.hpp"
#include "ballot/nn/random.hpp"
#include "ballot/nn/tensor.hpp"

namespace ballot::nn {

struct TrainOptions {
  int epochs = 10;
  int batch_size = 32;
  AdamConfig adam;
  std::uint64_t seed = 1;
  // Called after every epoch with the zero-based epoch and its mean training
  // loss. Returning false stops training early.
  std::function<bool(int, double)> on_epoch;

  void validate() const {
    if (epochs < 0) throw Error(Errc::parameter, "epochs must be >= 0");
    if (batch_size < 1) throw Error(Errc::parameter, "batch size must be >= 1");
    adam.validate();
  }
};

struct TrainReport {
  std::vector<double> epoch_loss;
};

template <typename Scalar>
struct LossAndGradients {
  Scalar loss = Scalar(0);
  GradientSet<Scalar> grads;
};

// Shuffled mini-batch Adam loop shared by both classifiers. `batch_fn` gets the
// example indices of one batch plus the dropout engine and returns the mean
// batch loss with its gradients.
template <typename Scalar, typename BatchFn>
TrainReport train_minibatch(ParameterSet<Scalar>& params, std::size_t num_examples,
                            const TrainOptions& options, BatchFn&& batch_fn) {
  options.validate();
  Rng rng(options.seed);
  AdamState<Scalar> adam(params, options.adam);
  std::vector<std::size_t> order(num_examples);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto batch = static_cast<std::size_t>(options.batch_size);

  TrainReport report;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    shuffle(order, rng);
    double total = 0.0;
    for (std::size_t start = 0; start < num_examples; start += batch) {
      const std::size_t end = std::min(num_examples, start + batch);
      const std::vector<std::size_t> indices(order.begin() + static_cast<std::ptrdiff_t>(start),
                                             order.begin() + static_cast<std::ptrdiff_t>(end));
      LossAndGradients<Scalar> step = batch_fn(indices, rng);
      total += static_cast<double>(step.loss) * static_cast<double>(indices.size());
      adam_step(params, step.grads, adam);
    }
    report.epoch_loss.push_back(total / static_cast<double>(num_examples));
    if (options.on_epoch && !options.on_epoch(epoch, report.epoch_loss.back())) break;
  }
  return report;
}

}  // namespace ballot::nn
