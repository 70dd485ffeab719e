#include "ballot/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_set>

#include "ballot/error.hpp"
#include "ballot/labels.hpp"
#include "ballot/nn/random.hpp"
#include "ballot/text.hpp"

namespace ballot {

using nlohmann::json;

void Corpus::add(Tweet tweet) {
  if (index_.contains(tweet.id))
    throw Error(Errc::duplicate_id, "duplicate tweet id '" + tweet.id + "'");
  index_.emplace(tweet.id, tweets_.size());
  tweets_.push_back(std::move(tweet));
}

const Tweet* Corpus::find(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &tweets_[it->second];
}

bool is_rfc3339(std::string_view ts) {
  auto digits = [&](std::size_t at, std::size_t n) {
    if (at + n > ts.size()) return false;
    for (std::size_t i = at; i < at + n; ++i)
      if (!std::isdigit(static_cast<unsigned char>(ts[i]))) return false;
    return true;
  };
  auto is = [&](std::size_t at, std::string_view chars) {
    return at < ts.size() && chars.find(ts[at]) != std::string_view::npos;
  };
  // YYYY-MM-DDTHH:MM:SS
  if (!(digits(0, 4) && is(4, "-") && digits(5, 2) && is(7, "-") && digits(8, 2) && is(10, "Tt ") &&
        digits(11, 2) && is(13, ":") && digits(14, 2) && is(16, ":") && digits(17, 2)))
    return false;
  auto field = [&](std::size_t at) { return (ts[at] - '0') * 10 + (ts[at + 1] - '0'); };
  if (field(5) < 1 || field(5) > 12 || field(8) < 1 || field(8) > 31 || field(11) > 23 ||
      field(14) > 59 || field(17) > 60)
    return false;
  std::size_t at = 19;
  if (is(at, ".")) {
    const std::size_t start = ++at;
    while (at < ts.size() && std::isdigit(static_cast<unsigned char>(ts[at]))) ++at;
    if (at == start) return false;
  }
  if (is(at, "Zz")) return at + 1 == ts.size();
  return is(at, "+-") && digits(at + 1, 2) && is(at + 3, ":") && digits(at + 4, 2) &&
         at + 6 == ts.size() && field(at + 1) <= 23 && field(at + 4) <= 59;
}

namespace {

std::optional<Tweet> parse_tweet(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error&) {
    return std::nullopt;
  }
  if (!j.is_object()) return std::nullopt;
  for (const char* key : {"id", "text", "timestamp"})
    if (!j.contains(key) || !j[key].is_string()) return std::nullopt;
  Tweet t;
  t.id = j["id"].get<std::string>();
  t.text = j["text"].get<std::string>();
  t.timestamp = j["timestamp"].get<std::string>();
  if (t.id.empty() || t.text.empty() || !is_rfc3339(t.timestamp)) return std::nullopt;
  if (j.contains("labels")) {
    const auto& l = j["labels"];
    if (!l.is_object()) return std::nullopt;
    if (l.contains("election")) {
      if (!l["election"].is_boolean()) return std::nullopt;
      t.labels.election = l["election"].get<bool>();
    }
    if (l.contains("topic")) {
      if (!l["topic"].is_string()) return std::nullopt;
      t.labels.topic = l["topic"].get<std::string>();
    }
    if (l.contains("sentiment")) {
      if (!l["sentiment"].is_string()) return std::nullopt;
      t.labels.sentiment = l["sentiment"].get<std::string>();
    }
  }
  return t;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot read '" + path + "'");
  return in;
}

}  // namespace

Corpus load_corpus(std::istream& in, LoadStats* stats) {
  Corpus corpus;
  LoadStats local;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++local.lines;
    auto tweet = parse_tweet(line);
    if (!tweet) {
      ++local.malformed;
      continue;
    }
    corpus.add(std::move(*tweet));
  }
  if (in.bad()) throw Error(Errc::io, "error while reading corpus");
  if (stats) *stats = local;
  if (local.malformed * 10 > local.lines)
    throw Error(Errc::format, std::to_string(local.malformed) + " of " +
                                  std::to_string(local.lines) + " corpus lines are malformed");
  if (local.malformed > 0)
    warn("skipped " + std::to_string(local.malformed) + " malformed corpus lines");
  return corpus;
}

Corpus load_corpus(const std::string& path, LoadStats* stats) {
  auto in = open_input(path);
  return load_corpus(in, stats);
}

json tweet_to_json(const Tweet& tweet) {
  json j = {{"id", tweet.id}, {"text", tweet.text}, {"timestamp", tweet.timestamp}};
  if (!tweet.labels.empty()) {
    json l = json::object();
    if (tweet.labels.election) l["election"] = *tweet.labels.election;
    if (tweet.labels.topic) l["topic"] = *tweet.labels.topic;
    if (tweet.labels.sentiment) l["sentiment"] = *tweet.labels.sentiment;
    j["labels"] = l;
  }
  return j;
}

TermMatcher::TermMatcher(const std::vector<std::string>& terms) {
  for (const auto& raw : terms) {
    auto tokens = tokenize(raw);
    if (tokens.empty()) continue;
    const std::string first = tokens.front();
    by_first_token_[first].push_back({join(split_whitespace(raw)), std::move(tokens)});
  }
}

bool TermMatcher::matches_at(const Term& term, const std::vector<std::string>& tokens,
                             std::size_t at) const {
  if (at + term.tokens.size() > tokens.size()) return false;
  return std::equal(term.tokens.begin(), term.tokens.end(),
                    tokens.begin() + static_cast<std::ptrdiff_t>(at));
}

std::vector<std::string> TermMatcher::match(const std::vector<std::string>& tokens) const {
  std::set<std::string> found;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto it = by_first_token_.find(tokens[i]);
    if (it == by_first_token_.end()) continue;
    for (const auto& term : it->second)
      if (matches_at(term, tokens, i)) found.insert(term.text);
  }
  return {found.begin(), found.end()};
}

bool TermMatcher::any(const std::vector<std::string>& tokens) const {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto it = by_first_token_.find(tokens[i]);
    if (it == by_first_token_.end()) continue;
    for (const auto& term : it->second)
      if (matches_at(term, tokens, i)) return true;
  }
  return false;
}

std::vector<std::string> match_terms(const Tweet& tweet, const std::vector<std::string>& terms) {
  return TermMatcher(terms).match(tokenize(tweet.text));
}

std::vector<std::size_t> LabeledDataset::class_counts() const {
  std::vector<std::size_t> counts(label_names.size(), 0);
  for (const auto& ex : examples) ++counts[static_cast<std::size_t>(ex.label)];
  return counts;
}

LabeledDataset distant_label_election(const Corpus& corpus, const std::vector<std::string>& seeds) {
  if (seeds.empty()) throw Error(Errc::config, "distant_label_election: empty seed list");
  const TermMatcher matcher(seeds);
  LabeledDataset out{election_labels(), {}};
  for (const auto& t : corpus)
    out.examples.push_back({t.id, t.text, matcher.any(tokenize(t.text)) ? 1 : 0});
  return out;
}

LabeledDataset distant_label_topic(const Corpus& corpus,
                                   const std::vector<std::vector<std::string>>& per_topic_terms,
                                   const std::vector<std::string>& label_names) {
  if (per_topic_terms.size() != label_names.size())
    throw Error(Errc::config, "distant_label_topic: " + std::to_string(per_topic_terms.size()) +
                                  " term lists for " + std::to_string(label_names.size()) +
                                  " labels");
  std::vector<TermMatcher> matchers;
  std::vector<std::string> empty;
  for (std::size_t i = 0; i < per_topic_terms.size(); ++i) {
    if (per_topic_terms[i].empty()) empty.push_back("'" + label_names[i] + "'");
    matchers.emplace_back(per_topic_terms[i]);
  }
  if (!empty.empty())
    warn("distant_label_topic: empty term list for " + std::to_string(empty.size()) +
         " label(s): " + join(empty, ", "));
  LabeledDataset out{label_names, {}};
  for (const auto& t : corpus) {
    const auto tokens = tokenize(t.text);
    int label = -1;
    bool ambiguous = false;
    for (std::size_t i = 0; i < matchers.size() && !ambiguous; ++i) {
      if (!matchers[i].any(tokens)) continue;
      if (label >= 0) ambiguous = true;
      label = static_cast<int>(i);
    }
    if (label >= 0 && !ambiguous) out.examples.push_back({t.id, t.text, label});
  }
  return out;
}

LabeledDataset distant_label_topic(const Corpus& corpus,
                                   const std::vector<std::vector<std::string>>& per_topic_terms) {
  return distant_label_topic(corpus, per_topic_terms, topic_labels());
}

LabeledDataset distant_label_sentiment(const Corpus& corpus,
                                       const std::vector<std::string>& positive_lexicon,
                                       const std::vector<std::string>& negative_lexicon) {
  if (positive_lexicon.empty() || negative_lexicon.empty())
    throw Error(Errc::config, "distant_label_sentiment: lexicons must be non-empty");
  std::unordered_set<std::string> positive;
  std::unordered_set<std::string> negative;
  for (const auto& w : positive_lexicon) positive.insert(to_lower(trim(w)));
  for (const auto& w : negative_lexicon) {
    const auto lw = to_lower(trim(w));
    if (positive.contains(lw))
      throw Error(Errc::config, "distant_label_sentiment: '" + lw + "' is in both lexicons");
    negative.insert(lw);
  }

  LabeledDataset out{sentiment_labels(), {}};
  for (const auto& t : corpus) {
    bool pos = false;
    bool neg = false;
    std::vector<std::string> kept;
    for (const auto& raw : split_whitespace(t.text)) {
      const std::string stripped = strip_punctuation(raw);
      const bool is_pos = positive.contains(raw) || positive.contains(stripped);
      const bool is_neg = negative.contains(raw) || negative.contains(stripped);
      pos = pos || is_pos;
      neg = neg || is_neg;
      if (!is_pos && !is_neg) kept.push_back(raw);
    }
    if (pos && neg) continue;
    if (kept.empty()) continue;
    const int label = pos ? 0 : neg ? 1 : kSentimentNeutral;
    out.examples.push_back({t.id, join(kept), label});
  }
  return out;
}

std::pair<LabeledDataset, LabeledDataset> split_dataset(const LabeledDataset& dataset,
                                                        double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw Error(Errc::parameter, "split_dataset: test fraction must lie in (0,1)");
  std::vector<std::vector<std::size_t>> by_class(dataset.label_names.size());
  for (std::size_t i = 0; i < dataset.examples.size(); ++i)
    by_class[static_cast<std::size_t>(dataset.examples[i].label)].push_back(i);

  nn::Rng rng(seed);
  std::vector<bool> is_test(dataset.examples.size(), false);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& members = by_class[c];
    if (members.empty()) continue;
    if (members.size() < 2)
      throw Error(Errc::stratification, "split_dataset: class '" + dataset.label_names[c] +
                                            "' has fewer than 2 examples");
    nn::shuffle(members, rng);
    const auto n = static_cast<long>(members.size());
    const long n_test = std::clamp(std::lround(static_cast<double>(n) * test_fraction), 1L, n - 1);
    for (long k = 0; k < n_test; ++k) is_test[members[static_cast<std::size_t>(k)]] = true;
  }

  LabeledDataset train{dataset.label_names, {}};
  LabeledDataset test{dataset.label_names, {}};
  for (std::size_t i = 0; i < dataset.examples.size(); ++i)
    (is_test[i] ? test : train).examples.push_back(dataset.examples[i]);
  return {std::move(train), std::move(test)};
}

EvalReport evaluate(std::span<const int> predictions, std::span<const int> gold,
                    const std::vector<std::string>& labels) {
  if (predictions.size() != gold.size())
    throw Error(Errc::shape, "evaluate: " + std::to_string(predictions.size()) +
                                 " predictions for " + std::to_string(gold.size()) +
                                 " gold labels");
  const std::size_t k = labels.size();
  EvalReport r;
  r.labels = labels;
  r.per_class.resize(k);
  r.confusion.assign(k, std::vector<std::size_t>(k, 0));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const int g = gold[i];
    const int p = predictions[i];
    if (g < 0 || p < 0 || static_cast<std::size_t>(g) >= k || static_cast<std::size_t>(p) >= k)
      throw Error(Errc::parameter, "evaluate: label outside the label space");
    ++r.confusion[static_cast<std::size_t>(g)][static_cast<std::size_t>(p)];
    if (g == p) ++correct;
  }

  std::size_t active = 0;
  std::size_t total_support = 0;
  for (std::size_t c = 0; c < k; ++c) {
    auto& m = r.per_class[c];
    const std::size_t tp = r.confusion[c][c];
    for (std::size_t o = 0; o < k; ++o) {
      m.support += r.confusion[c][o];
      m.predicted += r.confusion[o][c];
    }
    m.precision = m.predicted ? static_cast<double>(tp) / static_cast<double>(m.predicted) : 0.0;
    m.recall = m.support ? static_cast<double>(tp) / static_cast<double>(m.support) : 0.0;
    m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                                        : 0.0;
    if (m.support == 0 && m.predicted == 0) continue;
    ++active;
    r.macro_precision += m.precision;
    r.macro_recall += m.recall;
    r.macro_f1 += m.f1;
    r.weighted_f1 += static_cast<double>(m.support) * m.f1;
    total_support += m.support;
  }
  if (active) {
    r.macro_precision /= static_cast<double>(active);
    r.macro_recall /= static_cast<double>(active);
    r.macro_f1 /= static_cast<double>(active);
  }
  if (total_support) r.weighted_f1 /= static_cast<double>(total_support);
  if (!gold.empty()) r.accuracy = static_cast<double>(correct) / static_cast<double>(gold.size());
  return r;
}

json EvalReport::to_json() const {
  json classes = json::array();
  for (std::size_t c = 0; c < labels.size(); ++c) {
    const auto& m = per_class[c];
    classes.push_back({{"label", labels[c]},
                       {"precision", m.precision},
                       {"recall", m.recall},
                       {"f1", m.f1},
                       {"support", m.support},
                       {"predicted", m.predicted}});
  }
  return {{"per_class", classes},
          {"confusion", confusion},
          {"macro_precision", macro_precision},
          {"macro_recall", macro_recall},
          {"macro_f1", macro_f1},
          {"weighted_f1", weighted_f1},
          {"accuracy", accuracy}};
}

std::vector<std::string> read_term_list(std::istream& in) {
  std::vector<std::string> terms;
  std::unordered_set<std::string> seen;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.front() == ';') continue;
    std::string term = to_lower(trim(line));
    if (term.empty()) continue;
    if (seen.insert(term).second) terms.push_back(std::move(term));
  }
  return terms;
}

std::vector<std::string> read_term_list(const std::string& path) {
  auto in = open_input(path);
  return read_term_list(in);
}

void write_labeled_jsonl(const LabeledDataset& dataset, std::ostream& out) {
  for (const auto& ex : dataset.examples) {
    json j = {{"id", ex.id},
              {"text", ex.text},
              {"label", dataset.label_names[static_cast<std::size_t>(ex.label)]}};
    out << j.dump() << '\n';
  }
}

LabeledDataset read_labeled_jsonl(std::istream& in, const std::vector<std::string>& label_names) {
  LabeledDataset out{label_names, {}};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::string where = "dataset line " + std::to_string(line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(Errc::format, where + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("text") || !j["text"].is_string() || !j.contains("label") ||
        !j["label"].is_string())
      throw Error(Errc::format, where + ": expected string keys text and label");
    const auto label = label_index(label_names, j["label"].get<std::string>());
    if (!label)
      throw Error(Errc::format, where + ": unknown label '" + j["label"].get<std::string>() + "'");
    std::string id = j.contains("id") && j["id"].is_string() ? j["id"].get<std::string>()
                                                             : std::to_string(line_no);
    out.examples.push_back({std::move(id), j["text"].get<std::string>(), *label});
  }
  return out;
}

}  // namespace ballot
