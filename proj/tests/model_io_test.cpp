#include "ballot/model_io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <sstream>

#include "ballot/labels.hpp"
#include "support/gradient_suite.hpp"
#include "support/synthetic.hpp"

namespace ballot {
namespace {

std::string serialize(const auto& net) {
  std::stringstream ss;
  save_model(net, ss, {{"note", "test"}});
  return ss.str();
}

// Rewrites the manifest of a serialized container.
std::string edit_manifest(const std::string& bytes, const auto& edit) {
  std::uint64_t length = 0;
  std::memcpy(&length, bytes.data() + 12, 8);
  auto manifest = nlohmann::json::parse(bytes.substr(20, length));
  edit(manifest);
  const std::string text = manifest.dump();
  std::string out = bytes.substr(0, 12);
  const std::uint64_t new_length = text.size();
  out.append(reinterpret_cast<const char*>(&new_length), 8);
  return out + text + bytes.substr(20 + length);
}

Errc load_error(const std::string& bytes) {
  std::stringstream ss(bytes);
  try {
    load_election_model(ss);
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::usage;
}

ElectionNet trained_mini_election() {
  auto net = ElectionNet::build(testing::mini_election_config(), 12);
  testing::jitter_biases(net, 13);
  return net;
}

TEST(Container, ElectionRoundTripPreservesDecisions) {
  const auto net = trained_mini_election();
  std::stringstream ss(serialize(net));
  const auto loaded = load_election_model(ss);
  EXPECT_EQ(loaded.config().shape_chain(), net.config().shape_chain());
  nn::Rng rng(100);
  for (int i = 0; i < 100; ++i) {
    const auto x = encode_tweet(testing::random_chars(rng, 5 + nn::uniform_index(rng, 20)),
                                Alphabet::standard(), 20);
    const double a = net.forward(x), b = loaded.forward(x);
    EXPECT_LE(std::abs(a - b), 1e-6);
    EXPECT_EQ(decide_election(a, 0.5).election, decide_election(b, 0.5).election);
  }
}

TEST(Container, TopicRoundTripPreservesPredictions) {
  const auto ds = testing::topic_benchmark(topic_labels(), 2, 5);
  std::vector<std::vector<std::string>> docs;
  for (const auto& e : ds.examples) docs.push_back(tokenize_words(e.text));
  TSNetConfig config = testing::mini_ts_config();
  config.num_classes = 22;
  const auto net = TSNet::build(config, WordVocab::build(docs), topic_labels(), kTopicOther, 6);
  std::stringstream ss(serialize(net));
  const auto loaded = load_ts_model(ss);
  EXPECT_EQ(loaded.vocab().terms(), net.vocab().terms());
  EXPECT_EQ(loaded.label_names(), net.label_names());
  EXPECT_EQ(loaded.fallback_class(), kTopicOther);
  for (const auto& e : ds.examples) {
    const auto a = predict(net, e.text), b = predict(loaded, e.text);
    EXPECT_EQ(a.label, b.label);
    EXPECT_LE((a.probabilities - b.probabilities).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(Container, Float32LittleEndianPayload) {
  const auto net = trained_mini_election();
  const auto bytes = serialize(net);
  EXPECT_EQ(bytes.substr(0, 8), "BALLOTMD");
  std::uint64_t length = 0;
  std::memcpy(&length, bytes.data() + 12, 8);
  const auto manifest = nlohmann::json::parse(bytes.substr(20, length));
  EXPECT_EQ(manifest["kind"], "election");
  EXPECT_EQ(manifest["metadata"]["note"], "test");
  EXPECT_EQ(bytes.size() - 20 - length,
            4u * static_cast<std::size_t>(net.parameters().total_size()));
  const auto& first = manifest["tensors"][0];
  float value = 0;
  std::memcpy(&value, bytes.data() + 20 + length + first["offset"].get<std::size_t>(), 4);
  EXPECT_EQ(value, static_cast<float>(net.parameters()[0](0, 0)));
}

TEST(Container, ErrorsAreClassified) {
  const auto bytes = serialize(trained_mini_election());
  EXPECT_EQ(load_error(bytes.substr(0, bytes.size() - 10)), Errc::corrupt);
  EXPECT_EQ(load_error(bytes.substr(0, 15)), Errc::corrupt);
  EXPECT_EQ(load_error(bytes + "xxxx"), Errc::shape);
  EXPECT_EQ(load_error("NOTAMODEL" + bytes.substr(9)), Errc::format);

  std::string future = bytes;
  future[8] = 2;
  EXPECT_EQ(load_error(future), Errc::version);

  EXPECT_EQ(load_error(edit_manifest(bytes, [](auto& m) { m["tensors"][0]["shape"][0] = 5; })),
            Errc::shape);
  EXPECT_EQ(load_error(edit_manifest(bytes, [](auto& m) { m["kind"] = "topic_sentiment"; })),
            Errc::format);

  std::stringstream ts_stream(bytes);
  EXPECT_THROW(load_ts_model(ts_stream), Error);
}

TEST(Container, FileHelpers) {
  const auto dir = std::filesystem::temp_directory_path() / "ballot_model_io_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "m.bin").string();
  save_model(trained_mini_election(), path);
  EXPECT_EQ(model_kind(path), "election");
  EXPECT_NO_THROW(load_election_model(path));
  EXPECT_THROW(load_election_model((dir / "missing.bin").string()), Error);
  std::filesystem::remove_all(dir);
}

TEST(ConfigJson, RoundTrips) {
  const auto standard = ElectionNetConfig::standard();
  EXPECT_EQ(election_config_from_json(config_to_json(standard)).shape_chain(),
            standard.shape_chain());
  const auto ts = TSNetConfig::sentiment();
  const auto back = ts_config_from_json(config_to_json(ts));
  EXPECT_EQ(back.embedding_dim, 200);
  EXPECT_EQ(back.windows, ts.windows);
  EXPECT_EQ(back.num_classes, 3);
  EXPECT_THROW(election_config_from_json(nlohmann::json{{"conv", 3}}), Error);
}

}  // namespace
}  // namespace ballot
