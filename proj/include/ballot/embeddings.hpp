#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ballot/nn/tensor.hpp"

namespace ballot {

using TokenCorpus = std::vector<std::vector<std::string>>;

class Vocab {
 public:
  struct Entry {
    std::string term;
    long count = 0;
  };

  // Terms with count >= min_count, by descending count then lexicographically.
  // Throws Errc::empty_input for an empty corpus and Errc::config when fewer
  // than two terms survive.
  static Vocab build(const TokenCorpus& corpus, long min_count = 1);

  nn::Index size() const { return static_cast<nn::Index>(entries_.size()); }
  const std::string& term(nn::Index i) const { return entries_[static_cast<std::size_t>(i)].term; }
  long count(nn::Index i) const { return entries_[static_cast<std::size_t>(i)].count; }
  long min_count() const { return min_count_; }
  const std::vector<Entry>& entries() const { return entries_; }

  std::optional<nn::Index> find(std::string_view term) const;
  // Throws Errc::lookup for unknown terms.
  nn::Index index_of(std::string_view term) const;

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, nn::Index> index_;
  long min_count_ = 1;
};

// Frequency-based binary code tree for hierarchical softmax. For word w,
// paths[w][k] is the internal node deciding bit codes[w][k]; index 0 of each
// path is the root.
struct HuffmanTree {
  std::vector<std::vector<nn::Index>> paths;
  std::vector<std::vector<std::uint8_t>> codes;
  nn::Index internal_nodes = 0;

  // Ties between equal counts go to the lower vocabulary index (leaves) or the
  // earlier-created internal node.
  static HuffmanTree build(const Vocab& vocab);
};

// Terms and their vectors, as used for similarity queries.
class WordVectors {
 public:
  WordVectors() = default;
  WordVectors(std::vector<std::string> terms, nn::MatrixXd vectors);

  nn::Index size() const { return static_cast<nn::Index>(terms_.size()); }
  nn::Index dim() const { return vectors_.cols(); }
  const std::vector<std::string>& terms() const { return terms_; }
  const nn::MatrixXd& vectors() const { return vectors_; }
  std::optional<nn::Index> find(std::string_view term) const;
  nn::Index index_of(std::string_view term) const;

  // One line per term: the term followed by its floats, space separated.
  void write_text(std::ostream& out) const;
  static WordVectors read_text(std::istream& in);

 private:
  std::vector<std::string> terms_;
  nn::MatrixXd vectors_;
  std::unordered_map<std::string, nn::Index> index_;
};

struct SkipGramOptions {
  int window = 5;
  int dim = 100;
  int epochs = 5;
  double learning_rate = 0.025;
  long min_count = 1;
  std::uint64_t seed = 1;

  void validate() const;
};

struct SkipGramModel {
  Vocab vocab;
  HuffmanTree tree;
  nn::MatrixXd input_vectors;  // |V| x d
  nn::MatrixXd node_vectors;   // (|V|-1) x d
  int window = 5;

  int dim() const { return static_cast<int>(input_vectors.cols()); }
  WordVectors word_vectors() const;
};

// Stochastic gradient ascent on the mean of log p(context | center) over every
// (center, context) pair within +-window, with p given by hierarchical
// softmax. Out-of-vocabulary tokens are removed before windows are formed.
// The learning rate decays linearly to 1/100 of its initial value.
SkipGramModel train_skipgram(const TokenCorpus& corpus, const SkipGramOptions& options,
                             const std::function<void(int, const SkipGramModel&)>& on_epoch = {});

double hs_log_probability(const SkipGramModel& model, nn::Index center, nn::Index target);
double hs_probability(const SkipGramModel& model, std::string_view center, std::string_view target);

// Mean log p(context | center) over all pairs in the corpus.
double corpus_log_likelihood(const SkipGramModel& model, const TokenCorpus& corpus);

template <typename DerivedA, typename DerivedB>
double cosine_similarity(const Eigen::MatrixBase<DerivedA>& a,
                         const Eigen::MatrixBase<DerivedB>& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0)
    throw Error(Errc::undefined_similarity, "cosine similarity of a zero vector");
  if (a.size() != b.size()) throw Error(Errc::shape, "cosine similarity: length mismatch");
  return std::clamp(a.reshaped().dot(b.reshaped()) / (na * nb), -1.0, 1.0);
}

// The k most cosine-similar terms other than `term`, descending, ties broken
// by lower index. Zero vectors are never returned.
std::vector<std::pair<std::string, double>> top_k_similar(const WordVectors& vectors,
                                                          std::string_view term,
                                                          std::size_t k = 10);

}  // namespace ballot
