#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ballot/nn/layers.hpp"
#include "ballot/nn/loss.hpp"
#include "ballot/nn/train.hpp"
#include "ballot/text.hpp"

namespace ballot {

// Word vocabulary of the word-level classifier. Index 0 is the padding row and
// index 1 stands for every out-of-vocabulary word.
class WordVocab {
 public:
  static constexpr nn::Index kPad = 0;
  static constexpr nn::Index kOov = 1;

  WordVocab();
  // Terms in index order, including the two reserved entries first.
  explicit WordVocab(std::vector<std::string> terms);

  // Words occurring at least `min_count` times, by descending frequency then
  // lexicographically.
  static WordVocab build(const std::vector<std::vector<std::string>>& documents, int min_count = 1);

  nn::Index size() const { return static_cast<nn::Index>(terms_.size()); }
  nn::Index index_of(std::string_view term) const;
  const std::string& term(nn::Index i) const { return terms_[static_cast<std::size_t>(i)]; }
  const std::vector<std::string>& terms() const { return terms_; }

  std::vector<nn::Index> encode(const std::vector<std::string>& tokens) const;

 private:
  std::vector<std::string> terms_;
  std::unordered_map<std::string, nn::Index> index_;
};

struct TSNetConfig {
  nn::Index max_words = static_cast<nn::Index>(kMaxWords);
  nn::Index embedding_dim = 300;
  std::vector<nn::Index> windows{2, 3, 4};
  nn::Index filters = 200;
  nn::Index penultimate = 256;
  nn::Index num_classes = 22;
  double dropout_rate = 0.5;
  // Fraction of training tokens replaced by the OOV entry.
  double oov_rate = 0.01;
  double embedding_init = 0.25;

  // d=300, k=256, 22 classes.
  static TSNetConfig topic();
  // d=200, k=128, 3 classes.
  static TSNetConfig sentiment();

  void validate() const;
  nn::Index feature_size() const { return filters * static_cast<nn::Index>(windows.size()); }
};

// Word-level convolutional classifier: embedding lookup, one valid
// convolution + max-over-time pooling per window size, concatenation,
// dropout, a ReLU compression layer, dropout, softmax.
template <typename Scalar>
class BasicTSNet {
 public:
  using Matrix = nn::Matrix<Scalar>;

  static BasicTSNet build(const TSNetConfig& config, WordVocab vocab,
                          std::vector<std::string> label_names, int fallback_class,
                          std::uint64_t seed);

  BasicTSNet(TSNetConfig config, WordVocab vocab, std::vector<std::string> label_names,
             int fallback_class, nn::ParameterSet<Scalar> params);

  const TSNetConfig& config() const { return config_; }
  const WordVocab& vocab() const { return vocab_; }
  const std::vector<std::string>& label_names() const { return labels_; }
  int fallback_class() const { return fallback_; }
  nn::ParameterSet<Scalar>& parameters() { return params_; }
  const nn::ParameterSet<Scalar>& parameters() const { return params_; }

  // Class probabilities for a token-id sequence (truncated to max_words).
  // Throws Errc::empty_input for an empty sequence.
  nn::Vector<double> forward(const std::vector<nn::Index>& ids) const;
  nn::Vector<double> forward(const std::vector<std::string>& tokens) const {
    return forward(vocab_.encode(tokens));
  }

  // Concatenated pooled features before dropout (length filters x windows).
  nn::RowVector<Scalar> features(const std::vector<nn::Index>& ids) const;

  // Number of rows in the pre-pool feature map of each window.
  std::vector<nn::Index> feature_map_rows(const std::vector<nn::Index>& ids) const;

  // Mean cross-entropy with exact gradients, including the embedding rows.
  // Dropout and OOV substitution happen only when `rng` is non-null.
  nn::LossAndGradients<Scalar> loss_and_gradients(std::span<const std::vector<nn::Index>> inputs,
                                                  std::span<const int> labels, nn::Rng* rng) const;

 private:
  struct WindowCache {
    Matrix input;
    Matrix output;
    nn::IndexMatrix argmax;
  };
  struct ExampleCache {
    std::vector<nn::Index> ids;
    std::vector<WindowCache> windows;
  };

  BasicTSNet() = default;
  void declare_parameters();
  void check_ids(const std::vector<nn::Index>& ids) const;
  nn::RowVector<Scalar> encode_features(const std::vector<nn::Index>& ids,
                                        ExampleCache* cache) const;

  static constexpr nn::Index kEmbedding = 0;
  nn::Index conv_weight(std::size_t w) const { return static_cast<nn::Index>(1 + 2 * w); }
  nn::Index hidden_weight() const { return static_cast<nn::Index>(1 + 2 * config_.windows.size()); }
  nn::Index output_weight() const { return hidden_weight() + 2; }

  TSNetConfig config_;
  WordVocab vocab_;
  std::vector<std::string> labels_;
  int fallback_ = 0;
  nn::ParameterSet<Scalar> params_;
};

using TSNet = BasicTSNet<double>;

struct LabeledTokens {
  std::vector<std::string> tokens;
  int label = 0;
};

template <typename Scalar>
nn::TrainReport train_ts(BasicTSNet<Scalar>& net, std::span<const LabeledTokens> examples,
                         const nn::TrainOptions& options);

struct Prediction {
  int label = 0;
  nn::Vector<double> probabilities;
};

// Argmax class (lowest index on ties). Texts with no tokens get the net's
// fallback class and a uniform distribution.
Prediction predict(const TSNet& net, std::string_view text);

// Argmax with ties broken towards the lowest index.
int argmax_lowest(const nn::Vector<double>& probabilities);

// Vocabulary terms ranked by the class probability each receives when fed as
// a single-token input.
std::vector<std::pair<std::string, double>> top_terms_per_class(const TSNet& net, int label,
                                                                std::size_t k);

}  // namespace ballot

#include "ballot/topic_sentiment_model_impl.hpp"
