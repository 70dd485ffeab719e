#include "ballot/dataset.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "ballot/error.hpp"
#include "ballot/labels.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

namespace ballot {
namespace {

using Terms = std::vector<std::string>;
using testing::make_tweet;

Corpus corpus_of(const std::vector<std::string>& texts) {
  Corpus c;
  for (std::size_t i = 0; i < texts.size(); ++i)
    c.add(make_tweet("t" + std::to_string(i), texts[i]));
  return c;
}

TEST(LoadCorpus, ParsesJsonLines) {
  std::stringstream empty;
  EXPECT_TRUE(load_corpus(empty).empty());

  std::stringstream three(
      R"({"id":"1","text":"vote today","timestamp":"2016-11-08T10:00:00Z"})"
      "\n\n"
      R"({"id":"2","text":"hello","timestamp":"2016-11-08T10:00:00+01:00","labels":{"election":false}})"
      "\n"
      R"({"id":"3","text":"x","timestamp":"2016-11-08T10:00:00.5Z","labels":{"topic":"Guns"}})"
      "\n");
  LoadStats stats;
  const auto corpus = load_corpus(three, &stats);
  ASSERT_EQ(corpus.size(), 3u);
  EXPECT_EQ(stats.malformed, 0u);
  EXPECT_EQ(corpus[1].labels.election, false);
  EXPECT_EQ(corpus.find("3")->labels.topic, "Guns");
  EXPECT_EQ(corpus.find("4"), nullptr);
}

TEST(LoadCorpus, DuplicateIdsAndMalformedLines) {
  std::stringstream dup(R"({"id":"7","text":"a","timestamp":"2016-01-01T00:00:00Z"})"
                        "\n"
                        R"({"id":"7","text":"b","timestamp":"2016-01-01T00:00:00Z"})");
  try {
    load_corpus(dup);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::duplicate_id);
    EXPECT_NE(std::string(e.what()).find("7"), std::string::npos);
  }

  std::string text;
  for (int i = 0; i < 19; ++i)
    text += R"({"id":")" + std::to_string(i) +
            R"(","text":"a","timestamp":"2016-01-01T00:00:00Z"})"
            "\n";
  text += "not json\n";
  std::stringstream one_bad(text);
  LoadStats stats;
  EXPECT_EQ(load_corpus(one_bad, &stats).size(), 19u);
  EXPECT_EQ(stats.malformed, 1u);

  std::stringstream many_bad(text + "{}\n{\"id\":\"x\"}\n");
  EXPECT_THROW(load_corpus(many_bad), Error);
  EXPECT_THROW(load_corpus(std::string("/nonexistent/corpus.jsonl")), Error);
}

TEST(Timestamps, Rfc3339) {
  EXPECT_TRUE(is_rfc3339("2016-11-08T10:00:00Z"));
  EXPECT_TRUE(is_rfc3339("2016-11-08t10:00:00.123-05:00"));
  EXPECT_FALSE(is_rfc3339("2016-11-08 10:00"));
  EXPECT_FALSE(is_rfc3339("2016-13-08T10:00:00Z"));
}

TEST(MatchTerms, BoundariesHashtagsAndCase) {
  EXPECT_EQ(match_terms(make_tweet("1", "I love Donald Trump!"), {"donald trump"}),
            (Terms{"donald trump"}));
  EXPECT_TRUE(match_terms(make_tweet("1", "a trumpet solo"), {"trump"}).empty());
  EXPECT_EQ(match_terms(make_tweet("1", "#Election2016 tonight"), {"#election2016"}),
            (Terms{"#election2016"}));
  EXPECT_TRUE(match_terms(make_tweet("1", "#election2016ers"), {"#election2016"}).empty());
  EXPECT_TRUE(match_terms(make_tweet("1", "#election"), {"election"}).empty());
  EXPECT_EQ(match_terms(make_tweet("1", "VOTE, vote and Trump"), {"trump", "vote", "hillary"}),
            (Terms{"trump", "vote"}));
  EXPECT_EQ(match_terms(make_tweet("1", "vote, VOTE and TRUMP"), {"trump", "vote", "hillary"}),
            (Terms{"trump", "vote"}));
}

TEST(DistantLabels, ElectionPartitionsTheCorpus) {
  const auto corpus = corpus_of({"go vote", "nice weather", "#debate tonight", "lunch"});
  const auto ds = distant_label_election(corpus, {"vote", "#debate"});
  ASSERT_EQ(ds.examples.size(), 4u);
  EXPECT_EQ(ds.examples[0].label, 1);
  EXPECT_EQ(ds.examples[1].label, 0);
  EXPECT_EQ(ds.examples[2].label, 1);
  const auto counts = ds.class_counts();
  EXPECT_EQ(counts[0] + counts[1], corpus.size());
}

TEST(DistantLabels, TopicExclusivity) {
  std::vector<Terms> terms(22);
  terms[3] = {"nra", "gun control"};
  terms[17] = {"immigration"};
  terms[19] = {"medicaid", "obamacare"};
  const auto corpus = corpus_of(
      {"repeal obamacare now", "nra and immigration", "the weather", "Gun control works"});
  const auto ds = distant_label_topic(corpus, terms);
  ASSERT_EQ(ds.examples.size(), 2u);
  EXPECT_EQ(ds.label_names[static_cast<std::size_t>(ds.examples[0].label)], "Health Care");
  EXPECT_EQ(ds.examples[1].id, "t3");
  EXPECT_EQ(ds.examples[1].label, 3);
  EXPECT_THROW(distant_label_topic(corpus, std::vector<Terms>(3)), Error);
}

TEST(DistantLabels, SentimentStripsLexiconTokens) {
  const auto corpus =
      corpus_of({":) great day", "sad news :(", "the meeting is at 5", "happy but sad", ":)"});
  const auto ds = distant_label_sentiment(corpus, {":)", "happy"}, {":(", "sad"});
  ASSERT_EQ(ds.examples.size(), 3u);
  EXPECT_EQ(ds.examples[0].label, 0);
  EXPECT_EQ(ds.examples[0].text, "great day");
  EXPECT_EQ(ds.examples[1].label, 1);
  EXPECT_EQ(ds.examples[1].text, "news");
  EXPECT_EQ(ds.examples[2].label, kSentimentNeutral);
  EXPECT_EQ(ds.examples[2].text, "the meeting is at 5");
  try {
    distant_label_sentiment(corpus, {"ok"}, {"ok"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::config);
  }
}

LabeledDataset balanced(std::size_t per_class, int classes) {
  LabeledDataset ds{{}, {}};
  for (int c = 0; c < classes; ++c) ds.label_names.push_back("c" + std::to_string(c));
  for (std::size_t i = 0; i < per_class * static_cast<std::size_t>(classes); ++i)
    ds.examples.push_back({"e" + std::to_string(i), "x", static_cast<int>(i) % classes});
  return ds;
}

TEST(Split, StratifiedDeterministicPartition) {
  const auto ds = balanced(50, 2);
  const auto [train, test] = split_dataset(ds, 0.1, 3);
  EXPECT_EQ(train.examples.size(), 90u);
  EXPECT_EQ(test.class_counts(), (std::vector<std::size_t>{5, 5}));

  const auto [train2, test2] = split_dataset(ds, 0.1, 3);
  std::set<std::string> ids, test_ids;
  for (const auto& e : test.examples) test_ids.insert(e.id);
  for (std::size_t i = 0; i < test.examples.size(); ++i)
    EXPECT_EQ(test.examples[i].id, test2.examples[i].id);
  for (const auto& e : train.examples) {
    EXPECT_FALSE(test_ids.contains(e.id));
    ids.insert(e.id);
  }
  ids.insert(test_ids.begin(), test_ids.end());
  EXPECT_EQ(ids.size(), 100u);

  const auto [train3, test3] = split_dataset(ds, 0.1, 4);
  bool differs = false;
  for (std::size_t i = 0; i < test.examples.size(); ++i)
    differs |= test.examples[i].id != test3.examples[i].id;
  EXPECT_TRUE(differs);

  auto tiny = balanced(1, 2);
  EXPECT_THROW(split_dataset(tiny, 0.1, 1), Error);
  EXPECT_THROW(split_dataset(ds, 1.0, 1), Error);
}

TEST(Split, ProportionsWithinOneExample) {
  LabeledDataset ds = balanced(0, 3);
  const std::size_t sizes[] = {13, 47, 101};
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < sizes[c]; ++i)
      ds.examples.push_back({std::to_string(c) + "_" + std::to_string(i), "x", c});
  const auto [train, test] = split_dataset(ds, 0.2, 9);
  const auto counts = test.class_counts();
  for (int c = 0; c < 3; ++c)
    EXPECT_LE(std::abs(static_cast<double>(counts[static_cast<std::size_t>(c)]) -
                       0.2 * static_cast<double>(sizes[c])),
              1.0);
}

TEST(Evaluate, HandExampleAndDegenerateClass) {
  const std::vector<int> gold{1, 1, 0, 0}, pred{1, 0, 0, 0};
  const auto r = evaluate(pred, gold, {"a", "b", "never"});
  EXPECT_DOUBLE_EQ(r.per_class[1].precision, 1.0);
  EXPECT_DOUBLE_EQ(r.per_class[1].recall, 0.5);
  EXPECT_DOUBLE_EQ(r.per_class[1].f1, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.per_class[0].f1, 0.8);
  EXPECT_EQ(r.per_class[2].support, 0u);
  EXPECT_DOUBLE_EQ(r.per_class[2].f1, 0.0);
  EXPECT_DOUBLE_EQ(r.weighted_f1, (2 * 0.8 + 2 * 2.0 / 3.0) / 4);
  EXPECT_DOUBLE_EQ(r.macro_f1, (0.8 + 2.0 / 3.0) / 2);
  EXPECT_EQ(r.confusion[1], (std::vector<std::size_t>{1, 1, 0}));
  EXPECT_DOUBLE_EQ(r.accuracy, 0.75);

  const auto perfect = evaluate(gold, gold, {"a", "b"});
  EXPECT_DOUBLE_EQ(perfect.weighted_f1, 1.0);
  EXPECT_DOUBLE_EQ(perfect.macro_precision, 1.0);
  EXPECT_THROW(evaluate(std::vector<int>{1}, gold, {"a", "b"}), Error);
  EXPECT_THROW(evaluate(std::vector<int>{5}, std::vector<int>{0}, {"a", "b"}), Error);
}

TEST(Evaluate, AgreesWithRecountOracle) {
  nn::Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> gold(500), pred(500);
    for (std::size_t i = 0; i < gold.size(); ++i) {
      gold[i] = static_cast<int>(nn::uniform_index(rng, 22));
      pred[i] = nn::uniform01(rng) < 0.6 ? gold[i] : static_cast<int>(nn::uniform_index(rng, 20));
    }
    const auto r = evaluate(pred, gold, topic_labels());
    const auto o = testing::recount_metrics(pred, gold, 22);
    EXPECT_NEAR(r.weighted_f1, o.weighted_f1, 1e-12);
    EXPECT_NEAR(r.macro_f1, o.macro_f1, 1e-12);
    EXPECT_NEAR(r.macro_precision, o.macro_precision, 1e-12);
    EXPECT_NEAR(r.macro_recall, o.macro_recall, 1e-12);
    EXPECT_NEAR(r.accuracy, o.accuracy, 1e-12);
    for (std::size_t c = 0; c < 22; ++c) {
      EXPECT_NEAR(r.per_class[c].f1, o.f1[c], 1e-12);
      std::size_t row = 0;
      for (auto n : r.confusion[c]) row += n;
      EXPECT_EQ(row, r.per_class[c].support);
    }
  }
}

TEST(TermLists, CommentsAndDuplicates) {
  std::stringstream in("; seeds\nVote\n#Debate\n  vote  \n\n;#not\ndonald trump\n");
  EXPECT_EQ(read_term_list(in), (Terms{"vote", "#debate", "donald trump"}));
}

TEST(LabeledJsonl, RoundTrip) {
  LabeledDataset ds{election_labels(), {{"1", "go vote", 1}, {"2", "lunch", 0}}};
  std::stringstream ss;
  write_labeled_jsonl(ds, ss);
  const auto back = read_labeled_jsonl(ss, election_labels());
  ASSERT_EQ(back.examples.size(), 2u);
  EXPECT_EQ(back.examples[0].text, "go vote");
  EXPECT_EQ(back.examples[0].label, 1);
  std::stringstream bad(R"({"id":"1","text":"x","label":"nope"})");
  EXPECT_THROW(read_labeled_jsonl(bad, election_labels()), Error);
}

}  // namespace
}  // namespace ballot
