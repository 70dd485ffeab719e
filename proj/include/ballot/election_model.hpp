#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ballot/char_text.hpp"
#include "ballot/nn/layers.hpp"
#include "ballot/nn/loss.hpp"
#include "ballot/nn/train.hpp"

namespace ballot {

// Geometry of the character-level election classifier: a stack of valid
// convolutions (ReLU, optional non-overlapping max pooling), a row-major
// flatten, then dense layers ending in a single sigmoid unit.
struct ElectionNetConfig {
  nn::Index input_length = kMaxChars;
  nn::Index alphabet_size = kAlphabetSize;
  std::vector<nn::ConvLayerSpec> conv;
  std::vector<nn::DenseLayerSpec> dense;

  // 150x70 input; conv (7,256,p3) (7,256,p3) (3,256) (3,256) (3,256);
  // dense 2048 -> 1024 (dropout 0.5) -> 512 -> 1.
  static ElectionNetConfig standard();

  // Throws Errc::config unless the layers chain together.
  void validate() const;

  // Rows x cols after every stage, starting with the input and ending with
  // the output unit. Convolution and pooling are listed as separate stages.
  std::vector<std::pair<nn::Index, nn::Index>> shape_chain() const;

  nn::Index flatten_size() const;

  // One-hot text at this network's input length.
  CharMatrix encode(std::string_view text) const;
};

template <typename Scalar>
class BasicElectionNet {
 public:
  using Matrix = nn::Matrix<Scalar>;

  // Glorot-uniform weights, zero biases.
  static BasicElectionNet build(const ElectionNetConfig& config, std::uint64_t seed);

  // Adopts an existing parameter set; shapes must match `config`.
  BasicElectionNet(ElectionNetConfig config, nn::ParameterSet<Scalar> params);

  const ElectionNetConfig& config() const { return config_; }
  nn::ParameterSet<Scalar>& parameters() { return params_; }
  const nn::ParameterSet<Scalar>& parameters() const { return params_; }

  // Probability that the text is election-related; dropout is inactive.
  double forward(const CharMatrix& input) const;
  std::vector<double> forward(std::span<const CharMatrix> inputs) const;

  // Shapes observed during an actual forward pass (same stages as shape_chain).
  std::vector<std::pair<nn::Index, nn::Index>> trace_shapes(const CharMatrix& input) const;

  // Mean binary cross-entropy over the batch with exact gradients. Dropout is
  // applied only when `dropout_rng` is non-null.
  nn::LossAndGradients<Scalar> loss_and_gradients(std::span<const CharMatrix> inputs,
                                                  std::span<const double> targets,
                                                  nn::Rng* dropout_rng) const;

 private:
  struct ConvCache {
    Matrix input;
    Matrix output;
    nn::IndexMatrix argmax;
  };
  struct DenseCache {
    Matrix input;
    Matrix activated;
    Matrix mask;
  };

  BasicElectionNet() = default;
  void declare_parameters();
  nn::Index conv_weight(std::size_t i) const { return static_cast<nn::Index>(2 * i); }
  nn::Index dense_weight(std::size_t i) const {
    return static_cast<nn::Index>(2 * (config_.conv.size() + i));
  }

  Matrix conv_stack(const CharMatrix& input, std::vector<ConvCache>* caches) const;
  Matrix dense_stack(Matrix h, std::vector<DenseCache>* caches, nn::Rng* dropout_rng) const;
  void check_input(const CharMatrix& input) const;

  ElectionNetConfig config_;
  nn::ParameterSet<Scalar> params_;
};

using ElectionNet = BasicElectionNet<double>;

template <typename Scalar>
nn::TrainReport train_election(BasicElectionNet<Scalar>& net, std::span<const CharMatrix> inputs,
                               std::span<const int> labels, const nn::TrainOptions& options);

struct ElectionDecision {
  bool election = false;
  double score = 0.0;
};

// election iff score >= threshold; `threshold` must lie in (0,1).
ElectionDecision decide_election(double score, double threshold);

ElectionDecision classify_election(const ElectionNet& net, std::string_view text,
                                   double threshold = 0.5);

}  // namespace ballot

#include "ballot/election_model_impl.hpp"
