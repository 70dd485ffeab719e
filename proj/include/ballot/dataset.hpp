#pragma once

#include <cstdint>
#include <iosfwd>
#include <json.hpp>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ballot {

struct TweetLabels {
  std::optional<bool> election;
  std::optional<std::string> topic;
  std::optional<std::string> sentiment;

  bool empty() const { return !election && !topic && !sentiment; }
};

struct Tweet {
  std::string id;
  std::string text;
  std::string timestamp;  // RFC 3339
  TweetLabels labels;
};

class Corpus {
 public:
  // Throws Errc::duplicate_id naming the id.
  void add(Tweet tweet);

  std::size_t size() const { return tweets_.size(); }
  bool empty() const { return tweets_.empty(); }
  const Tweet& operator[](std::size_t i) const { return tweets_[i]; }
  const std::vector<Tweet>& tweets() const { return tweets_; }
  auto begin() const { return tweets_.begin(); }
  auto end() const { return tweets_.end(); }
  const Tweet* find(std::string_view id) const;

 private:
  std::vector<Tweet> tweets_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct LoadStats {
  std::size_t lines = 0;
  std::size_t malformed = 0;
};

// JSON Lines with required string keys id, text, timestamp and an optional
// labels object. Blank lines are ignored; malformed lines are skipped and
// counted, and more than 10% malformed lines is a format error.
Corpus load_corpus(std::istream& in, LoadStats* stats = nullptr);
Corpus load_corpus(const std::string& path, LoadStats* stats = nullptr);

bool is_rfc3339(std::string_view timestamp);

nlohmann::json tweet_to_json(const Tweet& tweet);

// Case-insensitive term matching over tokenize() output. Plain terms match
// whole tokens (multi-word terms as contiguous token runs); hashtag and
// handle terms match the whole prefixed token.
class TermMatcher {
 public:
  explicit TermMatcher(const std::vector<std::string>& terms);

  // Matched terms, sorted and unique.
  std::vector<std::string> match(const std::vector<std::string>& tokens) const;
  bool any(const std::vector<std::string>& tokens) const;

 private:
  struct Term {
    std::string text;
    std::vector<std::string> tokens;
  };
  bool matches_at(const Term& term, const std::vector<std::string>& tokens, std::size_t at) const;

  std::unordered_map<std::string, std::vector<Term>> by_first_token_;
};

std::vector<std::string> match_terms(const Tweet& tweet, const std::vector<std::string>& terms);

struct LabeledExample {
  std::string id;
  std::string text;
  int label = 0;
};

struct LabeledDataset {
  std::vector<std::string> label_names;
  std::vector<LabeledExample> examples;

  std::vector<std::size_t> class_counts() const;
};

inline const std::vector<std::string>& election_labels() {
  static const std::vector<std::string> labels{"non_election", "election"};
  return labels;
}

// Seed matches are positives (label 1); everything else is a negative.
LabeledDataset distant_label_election(const Corpus& corpus, const std::vector<std::string>& seeds);

// One term list per label. A tweet is kept only when it matches exactly one
// label's terms.
LabeledDataset distant_label_topic(const Corpus& corpus,
                                   const std::vector<std::vector<std::string>>& per_topic_terms,
                                   const std::vector<std::string>& label_names);
LabeledDataset distant_label_topic(const Corpus& corpus,
                                   const std::vector<std::vector<std::string>>& per_topic_terms);

// positive-only -> positive, negative-only -> negative, neither -> neutral,
// both -> excluded. Matched lexicon tokens are removed from the text; texts
// left empty are excluded.
LabeledDataset distant_label_sentiment(const Corpus& corpus,
                                       const std::vector<std::string>& positive_lexicon,
                                       const std::vector<std::string>& negative_lexicon);

// Stratified split; every class contributes round(n * test_fraction) test
// examples, clamped to [1, n-1]. Relative order is preserved in both halves.
std::pair<LabeledDataset, LabeledDataset> split_dataset(const LabeledDataset& dataset,
                                                        double test_fraction, std::uint64_t seed);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
  std::size_t predicted = 0;
};

struct EvalReport {
  std::vector<std::string> labels;
  std::vector<ClassMetrics> per_class;
  std::vector<std::vector<std::size_t>> confusion;  // [gold][predicted]
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double weighted_f1 = 0.0;
  double accuracy = 0.0;

  nlohmann::json to_json() const;
};

// Macro averages run over classes that occur in gold or predictions; the
// weighted F-score weights per-class F1 by gold support.
EvalReport evaluate(std::span<const int> predictions, std::span<const int> gold,
                    const std::vector<std::string>& labels);

// One entry per line, trimmed and lowercased; ';' starts a comment line.
// Duplicates are dropped, first occurrence wins.
std::vector<std::string> read_term_list(std::istream& in);
std::vector<std::string> read_term_list(const std::string& path);

void write_labeled_jsonl(const LabeledDataset& dataset, std::ostream& out);
LabeledDataset read_labeled_jsonl(std::istream& in, const std::vector<std::string>& label_names);

}  // namespace ballot
