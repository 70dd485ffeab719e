#include "ballot/topic_sentiment_model.hpp"

#include <algorithm>
#include <map>

namespace ballot {

using nn::Index;

WordVocab::WordVocab() : WordVocab(std::vector<std::string>{"<pad>", "<oov>"}) {}

WordVocab::WordVocab(std::vector<std::string> terms) : terms_(std::move(terms)) {
  if (terms_.size() < 2) throw Error(Errc::config, "word vocab: missing reserved entries");
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (!index_.emplace(terms_[i], static_cast<Index>(i)).second)
      throw Error(Errc::config, "word vocab: duplicate term '" + terms_[i] + "'");
  }
}

WordVocab WordVocab::build(const std::vector<std::vector<std::string>>& documents, int min_count) {
  std::map<std::string, long> counts;
  for (const auto& doc : documents)
    for (const auto& token : doc) ++counts[token];
  std::vector<std::pair<std::string, long>> kept;
  for (auto& [term, count] : counts)
    if (count >= min_count && term != "<pad>" && term != "<oov>") kept.emplace_back(term, count);
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> terms{"<pad>", "<oov>"};
  for (auto& [term, count] : kept) terms.push_back(term);
  return WordVocab(std::move(terms));
}

Index WordVocab::index_of(std::string_view term) const {
  const auto it = index_.find(std::string(term));
  if (it == index_.end() || it->second == kPad) return kOov;
  return it->second;
}

std::vector<Index> WordVocab::encode(const std::vector<std::string>& tokens) const {
  std::vector<Index> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(index_of(t));
  return ids;
}

TSNetConfig TSNetConfig::topic() {
  TSNetConfig c;
  c.embedding_dim = 300;
  c.penultimate = 256;
  c.num_classes = 22;
  return c;
}

TSNetConfig TSNetConfig::sentiment() {
  TSNetConfig c;
  c.embedding_dim = 200;
  c.penultimate = 128;
  c.num_classes = 3;
  return c;
}

void TSNetConfig::validate() const {
  if (max_words < 1) throw Error(Errc::config, "ts config: max_words must be >= 1");
  if (embedding_dim < 1) throw Error(Errc::config, "ts config: embedding_dim must be >= 1");
  if (windows.empty()) throw Error(Errc::config, "ts config: no window sizes");
  for (Index l : windows)
    if (l < 1 || l > max_words) throw Error(Errc::config, "ts config: window size out of range");
  if (filters < 1 || penultimate < 1)
    throw Error(Errc::config, "ts config: layer sizes must be >= 1");
  if (num_classes < 2) throw Error(Errc::config, "ts config: need at least two classes");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
    throw Error(Errc::config, "ts config: dropout rate outside [0,1)");
  if (!(oov_rate >= 0.0 && oov_rate < 1.0))
    throw Error(Errc::config, "ts config: oov rate outside [0,1)");
  if (!(embedding_init > 0.0)) throw Error(Errc::config, "ts config: embedding_init must be > 0");
}

int argmax_lowest(const nn::Vector<double>& probabilities) {
  int best = 0;
  for (Index i = 1; i < probabilities.size(); ++i)
    if (probabilities(i) > probabilities(best)) best = static_cast<int>(i);
  return best;
}

Prediction predict(const TSNet& net, std::string_view text) {
  const auto tokens = tokenize_words(text);
  if (tokens.empty()) {
    const Index classes = net.config().num_classes;
    return {net.fallback_class(),
            nn::Vector<double>::Constant(classes, 1.0 / static_cast<double>(classes))};
  }
  Prediction p;
  p.probabilities = net.forward(tokens);
  p.label = argmax_lowest(p.probabilities);
  return p;
}

std::vector<std::pair<std::string, double>> top_terms_per_class(const TSNet& net, int label,
                                                                std::size_t k) {
  if (label < 0 || label >= net.config().num_classes)
    throw Error(Errc::parameter,
                "top_terms_per_class: class " + std::to_string(label) + " out of range");
  std::vector<std::pair<Index, double>> scored;
  for (Index id = 2; id < net.vocab().size(); ++id)
    scored.emplace_back(id, net.forward(std::vector<Index>{id})(label));
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (scored.size() > k) scored.resize(k);
  std::vector<std::pair<std::string, double>> out;
  for (const auto& [id, p] : scored) out.emplace_back(net.vocab().term(id), p);
  return out;
}

}  // namespace ballot
