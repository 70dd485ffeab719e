#include "ballot/embeddings.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <queue>
#include <sstream>

#include "ballot/nn/layers.hpp"
#include "ballot/nn/random.hpp"

namespace ballot {

using nn::Index;

Vocab Vocab::build(const TokenCorpus& corpus, long min_count) {
  std::map<std::string, long> counts;
  for (const auto& sentence : corpus)
    for (const auto& token : sentence) ++counts[token];
  if (counts.empty()) throw Error(Errc::empty_input, "build_vocab: empty corpus");

  Vocab v;
  v.min_count_ = min_count;
  for (auto& [term, count] : counts)
    if (count >= min_count) v.entries_.push_back({term, count});
  // The map is already lexicographic, so a stable sort by count finishes the order.
  std::stable_sort(v.entries_.begin(), v.entries_.end(),
                   [](const Entry& a, const Entry& b) { return a.count > b.count; });
  if (v.entries_.size() < 2)
    throw Error(Errc::config, "build_vocab: " + std::to_string(v.entries_.size()) +
                                  " terms reach min_count " + std::to_string(min_count) +
                                  ", need at least 2");
  for (std::size_t i = 0; i < v.entries_.size(); ++i)
    v.index_.emplace(v.entries_[i].term, static_cast<Index>(i));
  return v;
}

std::optional<Index> Vocab::find(std::string_view term) const {
  const auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Index Vocab::index_of(std::string_view term) const {
  if (auto i = find(term)) return *i;
  throw Error(Errc::lookup, "term '" + std::string(term) + "' is not in the vocabulary");
}

HuffmanTree HuffmanTree::build(const Vocab& vocab) {
  const Index n = vocab.size();
  if (n < 2) throw Error(Errc::config, "build_huffman: need at least 2 terms");

  // Node ids: leaves are 0..n-1, internal nodes n..2n-2 in creation order.
  using Item = std::pair<long, Index>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (Index i = 0; i < n; ++i) heap.emplace(vocab.count(i), i);
  std::vector<Index> parent(static_cast<std::size_t>(2 * n - 1), -1);
  std::vector<std::uint8_t> bit(static_cast<std::size_t>(2 * n - 1), 0);
  Index next = n;
  while (heap.size() > 1) {
    const auto [c0, a] = heap.top();
    heap.pop();
    const auto [c1, b] = heap.top();
    heap.pop();
    parent[static_cast<std::size_t>(a)] = next;
    parent[static_cast<std::size_t>(b)] = next;
    bit[static_cast<std::size_t>(b)] = 1;
    heap.emplace(c0 + c1, next);
    ++next;
  }
  const Index root = next - 1;

  HuffmanTree tree;
  tree.internal_nodes = n - 1;
  tree.paths.resize(static_cast<std::size_t>(n));
  tree.codes.resize(static_cast<std::size_t>(n));
  for (Index leaf = 0; leaf < n; ++leaf) {
    auto& path = tree.paths[static_cast<std::size_t>(leaf)];
    auto& code = tree.codes[static_cast<std::size_t>(leaf)];
    for (Index node = leaf; node != root; node = parent[static_cast<std::size_t>(node)]) {
      code.push_back(bit[static_cast<std::size_t>(node)]);
      path.push_back(parent[static_cast<std::size_t>(node)] - n);
    }
    std::reverse(path.begin(), path.end());
    std::reverse(code.begin(), code.end());
  }
  return tree;
}

WordVectors::WordVectors(std::vector<std::string> terms, nn::MatrixXd vectors)
    : terms_(std::move(terms)), vectors_(std::move(vectors)) {
  if (static_cast<Index>(terms_.size()) != vectors_.rows())
    throw Error(Errc::shape, "word vectors: " + std::to_string(terms_.size()) + " terms but " +
                                 std::to_string(vectors_.rows()) + " rows");
  for (std::size_t i = 0; i < terms_.size(); ++i)
    if (!index_.emplace(terms_[i], static_cast<Index>(i)).second)
      throw Error(Errc::format, "word vectors: duplicate term '" + terms_[i] + "'");
}

std::optional<Index> WordVectors::find(std::string_view term) const {
  const auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Index WordVectors::index_of(std::string_view term) const {
  if (auto i = find(term)) return *i;
  throw Error(Errc::lookup, "term '" + std::string(term) + "' has no vector");
}

void WordVectors::write_text(std::ostream& out) const {
  char buf[64];
  for (Index i = 0; i < size(); ++i) {
    out << terms_[static_cast<std::size_t>(i)];
    for (Index j = 0; j < dim(); ++j) {
      const auto res = std::to_chars(buf, buf + sizeof buf, vectors_(i, j));
      out << ' ' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
    }
    out << '\n';
  }
}

WordVectors WordVectors::read_text(std::istream& in) {
  std::vector<std::string> terms;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string term;
    fields >> term;
    std::vector<double> row;
    std::string value;
    while (fields >> value) {
      double x = 0.0;
      const auto res = std::from_chars(value.data(), value.data() + value.size(), x);
      if (res.ec != std::errc() || res.ptr != value.data() + value.size())
        throw Error(Errc::format, "word vectors line " + std::to_string(line_no) +
                                      ": bad number '" + value + "'");
      row.push_back(x);
    }
    if (row.empty() || (!rows.empty() && row.size() != rows.front().size()))
      throw Error(Errc::format,
                  "word vectors line " + std::to_string(line_no) + ": inconsistent dimension");
    terms.push_back(std::move(term));
    rows.push_back(std::move(row));
  }
  nn::MatrixXd m(static_cast<Index>(rows.size()),
                 rows.empty() ? 0 : static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return WordVectors(std::move(terms), std::move(m));
}

void SkipGramOptions::validate() const {
  if (window < 1) throw Error(Errc::parameter, "skip-gram: context window must be >= 1");
  if (dim < 2) throw Error(Errc::parameter, "skip-gram: dimension must be >= 2");
  if (epochs < 0) throw Error(Errc::parameter, "skip-gram: epochs must be >= 0");
  if (!(learning_rate > 0.0)) throw Error(Errc::parameter, "skip-gram: learning rate must be > 0");
  if (min_count < 1) throw Error(Errc::parameter, "skip-gram: min_count must be >= 1");
}

WordVectors SkipGramModel::word_vectors() const {
  std::vector<std::string> terms;
  terms.reserve(static_cast<std::size_t>(vocab.size()));
  for (const auto& e : vocab.entries()) terms.push_back(e.term);
  return WordVectors(std::move(terms), input_vectors);
}

namespace {

std::vector<std::vector<Index>> to_indices(const Vocab& vocab, const TokenCorpus& corpus) {
  std::vector<std::vector<Index>> out;
  out.reserve(corpus.size());
  for (const auto& sentence : corpus) {
    std::vector<Index> ids;
    for (const auto& token : sentence)
      if (auto i = vocab.find(token)) ids.push_back(*i);
    out.push_back(std::move(ids));
  }
  return out;
}

// log sigmoid(x), stable for large |x|.
double log_sigmoid(double x) {
  return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

}  // namespace

double hs_log_probability(const SkipGramModel& model, Index center, Index target) {
  const auto h = model.input_vectors.row(center);
  const auto& path = model.tree.paths[static_cast<std::size_t>(target)];
  const auto& code = model.tree.codes[static_cast<std::size_t>(target)];
  double logp = 0.0;
  for (std::size_t k = 0; k < path.size(); ++k) {
    const double dot = model.node_vectors.row(path[k]).dot(h);
    logp += log_sigmoid(code[k] ? -dot : dot);
  }
  return logp;
}

double hs_probability(const SkipGramModel& model, std::string_view center,
                      std::string_view target) {
  return std::exp(
      hs_log_probability(model, model.vocab.index_of(center), model.vocab.index_of(target)));
}

double corpus_log_likelihood(const SkipGramModel& model, const TokenCorpus& corpus) {
  const auto sentences = to_indices(model.vocab, corpus);
  double total = 0.0;
  long pairs = 0;
  for (const auto& s : sentences) {
    const auto len = static_cast<long>(s.size());
    for (long n = 0; n < len; ++n) {
      for (long j = -model.window; j <= model.window; ++j) {
        if (j == 0 || n + j < 0 || n + j >= len) continue;
        total += hs_log_probability(model, s[static_cast<std::size_t>(n)],
                                    s[static_cast<std::size_t>(n + j)]);
        ++pairs;
      }
    }
  }
  if (pairs == 0) throw Error(Errc::empty_input, "corpus_log_likelihood: no context pairs");
  return total / static_cast<double>(pairs);
}

SkipGramModel train_skipgram(const TokenCorpus& corpus, const SkipGramOptions& options,
                             const std::function<void(int, const SkipGramModel&)>& on_epoch) {
  options.validate();
  SkipGramModel model;
  model.vocab = Vocab::build(corpus, options.min_count);
  model.tree = HuffmanTree::build(model.vocab);
  model.window = options.window;

  nn::Rng rng(options.seed);
  const double init = 0.5 / options.dim;
  model.input_vectors.resize(model.vocab.size(), options.dim);
  nn::fill_uniform(model.input_vectors, -init, init, rng);
  model.node_vectors = nn::MatrixXd::Zero(model.tree.internal_nodes, options.dim);

  const auto sentences = to_indices(model.vocab, corpus);
  long positions = 0;
  for (const auto& s : sentences) positions += static_cast<long>(s.size());
  const double total = static_cast<double>(positions) * options.epochs;
  long processed = 0;

  Eigen::RowVectorXd accum(options.dim);
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    for (const auto& s : sentences) {
      const auto len = static_cast<long>(s.size());
      for (long n = 0; n < len; ++n, ++processed) {
        const double lr =
            options.learning_rate * (1.0 - 0.99 * static_cast<double>(processed) / total);
        const Index center = s[static_cast<std::size_t>(n)];
        for (long j = -options.window; j <= options.window; ++j) {
          if (j == 0 || n + j < 0 || n + j >= len) continue;
          const Index target = s[static_cast<std::size_t>(n + j)];
          const auto& path = model.tree.paths[static_cast<std::size_t>(target)];
          const auto& code = model.tree.codes[static_cast<std::size_t>(target)];
          auto h = model.input_vectors.row(center);
          accum.setZero();
          for (std::size_t k = 0; k < path.size(); ++k) {
            auto node = model.node_vectors.row(path[k]);
            const double f = nn::sigmoid(node.dot(h));
            // Ascent step on log sigmoid(+-dot): bit 0 pushes f up, bit 1 down.
            const double g = lr * (1.0 - static_cast<double>(code[k]) - f);
            accum += g * node;
            node += g * h;
          }
          h += accum;
        }
      }
    }
    if (on_epoch) on_epoch(epoch, model);
  }
  return model;
}

std::vector<std::pair<std::string, double>> top_k_similar(const WordVectors& vectors,
                                                          std::string_view term, std::size_t k) {
  const Index q = vectors.index_of(term);
  const auto& m = vectors.vectors();
  const double qn = m.row(q).norm();
  if (qn == 0.0)
    throw Error(Errc::undefined_similarity, "term '" + std::string(term) + "' has a zero vector");
  const Eigen::VectorXd norms = m.rowwise().norm();
  const Eigen::VectorXd dots = m * m.row(q).transpose();

  std::vector<std::pair<Index, double>> scored;
  scored.reserve(static_cast<std::size_t>(vectors.size()));
  for (Index i = 0; i < vectors.size(); ++i) {
    if (i == q || norms(i) == 0.0) continue;
    scored.emplace_back(i, std::clamp(dots(i) / (qn * norms(i)), -1.0, 1.0));
  }
  const auto better = [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  };
  const std::size_t keep = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep),
                    scored.end(), better);
  std::vector<std::pair<std::string, double>> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i)
    out.emplace_back(vectors.terms()[static_cast<std::size_t>(scored[i].first)], scored[i].second);
  return out;
}

}  // namespace ballot
