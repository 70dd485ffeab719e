#include <gtest/gtest.h>

#include <algorithm>

#include "ballot/labels.hpp"
#include "ballot/topic_sentiment_model.hpp"
#include "support/gradient_suite.hpp"
#include "support/synthetic.hpp"

namespace ballot {
namespace {

using Tokens = std::vector<std::string>;

TSNet small_net(const std::vector<Tokens>& docs, const std::vector<std::string>& labels,
                std::uint64_t seed = 3) {
  TSNetConfig c;
  c.embedding_dim = 16;
  c.filters = 12;
  c.penultimate = 24;
  c.num_classes = static_cast<nn::Index>(labels.size());
  return TSNet::build(c, WordVocab::build(docs), labels, static_cast<int>(labels.size()) - 1, seed);
}

TEST(WordVocab, ReservedEntriesAndOrder) {
  const auto vocab = WordVocab::build({{"b", "a", "b"}, {"c", "a", "b"}});
  ASSERT_EQ(vocab.size(), 5);
  EXPECT_EQ(vocab.term(2), "b");
  EXPECT_EQ(vocab.term(3), "a");
  EXPECT_EQ(vocab.index_of("zzz"), WordVocab::kOov);
  EXPECT_EQ(vocab.encode({"a", "nope"}), (std::vector<nn::Index>{3, WordVocab::kOov}));
  EXPECT_EQ(WordVocab::build({{"b", "a", "b"}}, 2).size(), 3);
}

TEST(TSConfig, PaperInstances) {
  const auto topic = TSNetConfig::topic();
  EXPECT_EQ(topic.embedding_dim, 300);
  EXPECT_EQ(topic.penultimate, 256);
  EXPECT_EQ(topic.num_classes, 22);
  EXPECT_EQ(topic.feature_size(), 600);
  const auto sentiment = TSNetConfig::sentiment();
  EXPECT_EQ(sentiment.embedding_dim, 200);
  EXPECT_EQ(sentiment.penultimate, 128);
  EXPECT_EQ(sentiment.num_classes, 3);
  auto bad = topic;
  bad.windows = {};
  EXPECT_THROW(bad.validate(), Error);
}

TEST(TSNet, OutputLengthsAndSoftmaxContract) {
  const std::vector<Tokens> docs{{"jobs", "economy"}, {"guns"}};
  const auto topic =
      TSNet::build(TSNetConfig::topic(), WordVocab::build(docs), topic_labels(), kTopicOther, 1);
  const auto sentiment = TSNet::build(TSNetConfig::sentiment(), WordVocab::build(docs),
                                      sentiment_labels(), kSentimentNeutral, 1);
  for (const auto& doc : {Tokens{"jobs"}, Tokens{"guns", "jobs", "unknown", "economy"}}) {
    const auto p = topic.forward(doc);
    EXPECT_EQ(p.size(), 22);
    EXPECT_NEAR(p.sum(), 1.0, 1e-9);
    EXPECT_GT(p.minCoeff(), 0.0);
    const auto q = sentiment.forward(doc);
    EXPECT_EQ(q.size(), 3);
    EXPECT_NEAR(q.sum(), 1.0, 1e-9);
  }
  EXPECT_THROW(topic.forward(Tokens{}), Error);
}

TEST(TSNet, FeatureMapGeometry) {
  Tokens fifty;
  for (int i = 0; i < 60; ++i) fifty.push_back("w" + std::to_string(i % 7));
  const auto net =
      TSNet::build(TSNetConfig::topic(), WordVocab::build({fifty}), topic_labels(), kTopicOther, 2);
  const auto ids = net.vocab().encode(fifty);
  EXPECT_EQ(net.feature_map_rows(ids), (std::vector<nn::Index>{49, 48, 47}));
  EXPECT_EQ(net.features(ids).size(), 600);
  const std::vector<nn::Index> short_ids(ids.begin(), ids.begin() + 10);
  EXPECT_EQ(net.feature_map_rows(short_ids), (std::vector<nn::Index>{9, 8, 7}));
  EXPECT_EQ(net.features(short_ids).size(), 600);
  EXPECT_EQ(net.features({ids[0]}).size(), 600);
}

TEST(TSNet, PermutingOutputRowsPermutesProbabilities) {
  const std::vector<Tokens> docs{{"a", "b", "c"}, {"d"}};
  const auto net = small_net(docs, {"x", "y", "z"});
  auto params = net.parameters();
  const nn::Index w = params.size() - 2;
  params[w].row(0).swap(params[w].row(2));
  params[w + 1].col(0).swap(params[w + 1].col(2));
  const TSNet permuted(net.config(), net.vocab(), {"z", "y", "x"}, 2, params);
  const auto p = net.forward(docs[0]);
  const auto q = permuted.forward(docs[0]);
  EXPECT_NEAR(p(0), q(2), 1e-15);
  EXPECT_NEAR(p(1), q(1), 1e-15);
  EXPECT_NEAR(p(2), q(0), 1e-15);
}

TEST(Predict, ArgmaxTiesAndFallback) {
  nn::Vector<double> p(3);
  p << 0.1, 0.8, 0.1;
  EXPECT_EQ(argmax_lowest(p), 1);
  nn::Vector<double> tie(4);
  tie << 0.3, 0.2, 0.2, 0.3;
  EXPECT_EQ(argmax_lowest(tie), 0);

  const auto net = TSNet::build(TSNetConfig::sentiment(), WordVocab::build({{"ok"}}),
                                sentiment_labels(), kSentimentNeutral, 1);
  for (const char* text : {"", "  ...  !!"}) {
    const auto pred = predict(net, text);
    EXPECT_EQ(pred.label, kSentimentNeutral);
    EXPECT_TRUE(pred.probabilities.isApprox(nn::Vector<double>::Constant(3, 1.0 / 3)));
  }
}

std::vector<LabeledTokens> to_tokens(const LabeledDataset& ds) {
  std::vector<LabeledTokens> out;
  for (const auto& e : ds.examples) out.push_back({tokenize_words(e.text), e.label});
  return out;
}

TEST(TSTraining, OverfitsTwentyTwoClasses) {
  const auto ds = testing::topic_benchmark(topic_labels(), 5, 7);
  const auto examples = to_tokens(ds);
  std::vector<Tokens> docs;
  for (const auto& e : examples) docs.push_back(e.tokens);
  auto net = small_net(docs, topic_labels());
  nn::TrainOptions options;
  options.epochs = 60;
  options.batch_size = 16;
  options.adam.learning_rate = 0.01;
  const auto report = train_ts(net, examples, options);
  EXPECT_LT(report.epoch_loss.back(), report.epoch_loss.front());
  int correct = 0;
  for (const auto& e : examples) correct += argmax_lowest(net.forward(e.tokens)) == e.label;
  EXPECT_EQ(correct, static_cast<int>(examples.size()));

  EXPECT_EQ(top_terms_per_class(net, 0, 100000).size(),
            static_cast<std::size_t>(net.vocab().size() - 2));
  EXPECT_THROW(top_terms_per_class(net, 22, 5), Error);
}

TEST(TSTraining, PlantedMarkersRankHighest) {
  const auto ds = testing::topic_benchmark(topic_labels(), 30, 8);
  const auto examples = to_tokens(ds);
  std::vector<Tokens> docs;
  for (const auto& e : examples) docs.push_back(e.tokens);
  auto net = small_net(docs, topic_labels(), 4);
  nn::TrainOptions options;
  options.epochs = 20;
  options.batch_size = 16;
  options.adam.learning_rate = 0.01;
  train_ts(net, examples, options);
  for (int label : {0, 9, 21}) {
    const auto top = top_terms_per_class(net, label, 5);
    ASSERT_EQ(top.size(), 5u);
    const auto has = [&](const std::string& t) {
      return std::any_of(top.begin(), top.end(), [&](const auto& p) { return p.first == t; });
    };
    EXPECT_TRUE(has(testing::topic_marker(label, 0)) || has(testing::topic_marker(label, 1)))
        << label << " " << top[0].first << " " << top[1].first << " " << top[2].first;
    for (const auto& [term, prob] : top) EXPECT_NEAR(prob, net.forward(Tokens{term})(label), 1e-15);
  }
}

TEST(TSTraining, ZeroLearningRateAndDegenerateSets) {
  const std::vector<LabeledTokens> examples{{{"good", "day"}, 0}, {{"bad", "day"}, 1}};
  auto net = small_net({{"good", "day"}, {"bad", "day"}}, {"pos", "neg", "neu"});
  const auto before = net.parameters();
  nn::TrainOptions options;
  options.epochs = 3;
  options.adam.learning_rate = 0.0;
  train_ts(net, examples, options);
  for (nn::Index t = 0; t < before.size(); ++t) EXPECT_EQ(net.parameters()[t], before[t]);

  const std::vector<LabeledTokens> single{{{"good"}, 0}, {{"day"}, 0}};
  EXPECT_THROW(train_ts(net, single, options), Error);
  EXPECT_THROW(train_ts(net, std::vector<LabeledTokens>{}, options), Error);
}

}  // namespace
}  // namespace ballot
